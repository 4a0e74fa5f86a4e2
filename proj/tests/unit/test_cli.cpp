#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifdef CQFT_CLI_PATH

namespace fs = std::filesystem;
using doctest::Approx;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "cqft_unit_cli";

// Small, quick numerics shared by most invocations.
const std::string kQuick = " --Nz 32 --T 0.0002 --dt 4e-7 ";

int run(const std::string& args) {
  const std::string command = std::string(CQFT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
  const auto dir = kRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<std::vector<double>> read_rows(const fs::path& path, std::string* header = nullptr) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream fields(line);
    for (std::string field; std::getline(fields, field, ',');) row.push_back(std::stod(field));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes consistent outputs") {
  const auto dir = fresh("simulate");
  REQUIRE(run("simulate" + kQuick + "--Vs 1.5 --workers 2 --out " + dir.string()) == 0);
  std::string header;
  const auto series = read_rows(dir / "timeseries.csv", &header);
  CHECK(header == "t,N");
  REQUIRE(series.size() == 21);
  CHECK(series.front()[1] == 0.0);

  const auto density = read_rows(dir / "density.csv", &header);
  CHECK(header == "z,rho_e");
  REQUIRE(density.size() == 33);
  CHECK(density.front()[0] == Approx(-0.6));
  CHECK(density.back()[0] == Approx(0.6));
  double integral = 0.0;
  for (std::size_t i = 1; i < density.size(); ++i) {
    integral += 0.5 * (density[i][1] + density[i - 1][1]) * (density[i][0] - density[i - 1][0]);
  }
  const auto summary = read_json(dir / "summary.json");
  const double n = summary.at("N_final");
  CHECK(n > 0.0);
  CHECK(integral == Approx(n).epsilon(1e-6));
  CHECK(series.back()[1] == Approx(n).epsilon(1e-8));
  CHECK(summary.contains("wall_time_s"));
  CHECK(summary.at("config").at("Vs") == "1.5");
}

TEST_CASE("simulate without potential finds no pairs") {
  const auto dir = fresh("vacuum");
  REQUIRE(run("simulate" + kQuick + "--Vs 0 --Vo 0 --out " + dir.string()) == 0);
  CHECK(double(read_json(dir / "summary.json").at("N_final")) < 1e-10);
}

TEST_CASE("worker count does not change output files") {
  const auto one = fresh("workers1");
  const auto many = fresh("workers3");
  REQUIRE(run("simulate" + kQuick + "--Vs 2 --workers 1 --out " + one.string()) == 0);
  REQUIRE(run("simulate" + kQuick + "--Vs 2 --workers 3 --out " + many.string()) == 0);
  CHECK(slurp(one / "timeseries.csv") == slurp(many / "timeseries.csv"));
  CHECK(slurp(one / "density.csv") == slurp(many / "density.csv"));
  CHECK(read_json(one / "summary.json").at("N_final") == read_json(many / "summary.json").at("N_final"));

  const auto s1 = fresh("sweep_w1");
  const auto s3 = fresh("sweep_w3");
  const std::string axes = " --axis Vs=0:1:0.5 --axis omega=1:1.5:0.5 ";
  REQUIRE(run("sweep" + kQuick + axes + "--workers 1 --no-cache --csv " + (s1 / "s.csv").string()) == 0);
  REQUIRE(run("sweep" + kQuick + axes + "--workers 3 --csv " + (s3 / "s.csv").string()) == 0);
  CHECK(slurp(s1 / "s.csv") == slurp(s3 / "s.csv"));
  CHECK(fs::exists(s3 / "s.csv.journal"));
  CHECK_FALSE(fs::exists(s1 / "s.csv.journal"));
}

TEST_CASE("config file with flag override") {
  const auto dir = fresh("config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# quick run\nNz = 32\nT = 0.0002\ndt = 4e-7\nVs = 3\nVo = 0\n";
  }
  REQUIRE(run("simulate --config " + (dir / "run.cfg").string() + " --Vs 0.5 --out " + dir.string()) == 0);
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("config").at("Vs") == "0.5");
  CHECK(summary.at("config").at("Vo") == "0");
  CHECK(summary.at("config").at("Nz") == "32");
}

TEST_CASE("fast flag loads the coarse preset before other flags") {
  const auto dir = fresh("fast");
  REQUIRE(run("simulate --fast --T 0.0002 --Nz 16 --out " + dir.string()) == 0);
  const auto config = read_json(dir / "summary.json").at("config");
  CHECK(config.at("Nz") == "16");
  CHECK(std::stod(config.at("dt").get<std::string>()) == 2e-7);
}

TEST_CASE("exit codes") {
  const auto dir = fresh("errors");
  CHECK(run("simulate --Nz 31 --out " + dir.string()) == 2);
  CHECK(run("simulate --bogus") == 2);
  CHECK(run("simulate --Vs 2.5 --dt 1e-6 --out " + dir.string()) == 2);
  CHECK(run("simulate --config /nonexistent.cfg") == 2);
  CHECK(run("sweep --axis X=0:1:1") == 2);
  CHECK(run("spectrum --Nz 32 --critical --bracket 0:0.1 --csv " + (dir / "s.csv").string()) == 2);
  CHECK(run("") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("sweep one-point plan") {
  const auto dir = fresh("sweep_one");
  REQUIRE(run("sweep" + kQuick + "--axis Vs=2 --axis omega=1.5 --csv " + (dir / "one.csv").string()) == 0);
  std::string header;
  const auto rows = read_rows(dir / "one.csv", &header);
  CHECK(header == "Vs_over_c2,omega_over_c2,N_s,N_o,N_c,dN");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 2.0);
  CHECK(rows[0][1] == 1.5);
  const auto meta = read_json(dir / "one.csv.meta.json");
  CHECK(meta.contains("numerics_digest"));
  CHECK(meta.contains("wall_time_s"));
}

TEST_CASE("spectrum output") {
  const auto dir = fresh("spectrum");
  REQUIRE(run("spectrum --Nz 32 --depths 0 --csv " + (dir / "zero.csv").string()) == 0);
  CHECK(slurp(dir / "zero.csv") == "Vs_over_c2,level_index,energy_over_c2\n");

  REQUIRE(run("spectrum --Nz 128 --depths 0:3:0.05 --csv " + (dir / "fan.csv").string()) == 0);
  std::map<double, int> per_depth;
  for (const auto& row : read_rows(dir / "fan.csv")) per_depth[row[0]] += 1;
  // Below the first diving depth no level can leave the gap.
  int previous = 0;
  for (const auto& [depth, count] : per_depth) {
    if (depth > 2.0) break;
    CHECK(count >= previous);
    previous = count;
  }
  CHECK(previous >= 3);
}

}

#endif
