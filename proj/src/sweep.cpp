#include "cqft/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cqft/error.hpp"
#include "cqft/observables.hpp"

namespace cqft {

namespace {

std::string hex(double value) {
  char text[64];
  std::snprintf(text, sizeof text, "%a", value);
  return text;
}

std::string_view parameter_name(SweepParameter parameter) {
  return parameter == SweepParameter::static_depth ? "Vs" : "omega";
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string buffer(text);
  char* end = nullptr;
  const double value = std::strtod(buffer.c_str(), &end);
  if (buffer.empty() || end != buffer.c_str() + buffer.size() || !std::isfinite(value)) {
    throw ConfigError("cannot parse " + std::string(what) + " '" + buffer + "'");
  }
  return value;
}

}  // namespace

void SweepAxis::validate() const {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (!(start <= stop)) throw ConfigError("sweep start must not exceed stop");
  if (!(start >= 0.0)) throw ConfigError("sweep values must be non-negative");
}

std::vector<double> SweepAxis::values() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

SweepAxis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("axis must look like Vs=start:stop:step");
  const auto name = text.substr(0, eq);
  SweepAxis axis;
  if (name == "Vs") {
    axis.parameter = SweepParameter::static_depth;
  } else if (name == "omega") {
    axis.parameter = SweepParameter::frequency;
  } else {
    throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected Vs or omega)");
  }
  auto range = text.substr(eq + 1);
  std::vector<std::string_view> parts;
  while (true) {
    const auto colon = range.find(':');
    parts.push_back(range.substr(0, colon));
    if (colon == std::string_view::npos) break;
    range = range.substr(colon + 1);
  }
  if (parts.size() == 1) {
    axis.start = axis.stop = parse_number(parts[0], "axis value");
    axis.step = 1.0;
  } else if (parts.size() == 3) {
    axis.start = parse_number(parts[0], "axis start");
    axis.stop = parse_number(parts[1], "axis stop");
    axis.step = parse_number(parts[2], "axis step");
  } else {
    throw ConfigError("axis range must be start:stop:step");
  }
  axis.validate();
  return axis;
}

void SweepPlan::validate() const {
  if (axes.size() > 2) throw ConfigError("a sweep has at most two axes");
  if (axes.size() == 2 && axes[0].parameter == axes[1].parameter) {
    throw ConfigError("sweep axes must vary different parameters");
  }
  for (const auto& axis : axes) axis.validate();
  fixed.validate();
  stepper.validate();
  if (!(speed_of_light > 0.0)) throw ConfigError("speed of light must be positive");
}

std::string SweepPlan::numerics_digest() const {
  std::ostringstream canonical;
  canonical << "L=" << hex(grid.length()) << ";N=" << grid.size() << ";dt=" << hex(stepper.time_step)
            << ";T=" << hex(stepper.duration) << ";mid=" << stepper.midpoint_sampling << ";c=" << hex(speed_of_light)
            << ";cut=" << (energy_cutoff ? hex(*energy_cutoff) : std::string("none")) << ";D=" << hex(fixed.width)
            << ";W=" << hex(fixed.edge_width) << ";shape=" << to_string(fixed.shape)
            << ";sign=" << to_string(fixed.sign);
  char text[17];
  std::snprintf(text, sizeof text, "%016llx", static_cast<unsigned long long>(fnv1a(canonical.str())));
  return text;
}

PairCountCache::PairCountCache(std::filesystem::path journal) : journal_(std::move(journal)) {
  if (journal_.empty()) return;
  std::ifstream in(journal_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    char* end = nullptr;
    const double value = std::strtod(line.c_str() + tab + 1, &end);
    if (end == line.c_str() + tab + 1) continue;
    values_[line.substr(0, tab)] = value;
  }
}

std::optional<double> PairCountCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void PairCountCache::store(const std::string& key, double pairs) {
  std::lock_guard lock(mutex_);
  values_[key] = pairs;
  if (journal_.empty()) return;
  std::ofstream out(journal_, std::ios::app);
  out << key << '\t' << hex(pairs) << '\n';
  out.flush();
  if (!out) throw ConfigError("cannot append to sweep journal " + journal_.string());
}

std::size_t PairCountCache::size() const {
  std::lock_guard lock(mutex_);
  return values_.size();
}

namespace {

struct Job {
  std::string key;
  PotentialMode mode;
  WellParameters params;
};

struct Point {
  double static_depth_c2;
  double frequency_c2;
  std::size_t static_job, oscillating_job, combined_job;
};

std::string describe(const Job& job, double c2) {
  std::ostringstream text;
  text << to_string(job.mode) << " run at Vs=" << job.params.static_depth / c2 << "c^2, omega=" << job.params.frequency / c2
       << "c^2";
  return text.str();
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepPlan& plan, PairCountCache* cache,
                                   const std::function<void(SweepProgress)>& progress) {
  plan.validate();
  const double c2 = plan.speed_of_light * plan.speed_of_light;
  const std::string digest = plan.numerics_digest();

  // Axis values in c^2 units, or the fixed parameter when not swept.
  std::vector<std::vector<double>> axis_values;
  for (const auto& axis : plan.axes) axis_values.push_back(axis.values());
  auto fixed_value = [&](SweepParameter parameter) {
    return parameter == SweepParameter::static_depth ? plan.fixed.static_depth / c2 : plan.fixed.frequency / c2;
  };

  std::vector<std::pair<double, double>> grid_points;  // (V_s/c^2, omega/c^2)
  auto add_point = [&](SweepParameter p0, double v0, std::optional<std::pair<SweepParameter, double>> second) {
    double vs = fixed_value(SweepParameter::static_depth);
    double om = fixed_value(SweepParameter::frequency);
    (p0 == SweepParameter::static_depth ? vs : om) = v0;
    if (second) (second->first == SweepParameter::static_depth ? vs : om) = second->second;
    grid_points.emplace_back(vs, om);
  };
  if (plan.axes.empty()) {
    grid_points.emplace_back(fixed_value(SweepParameter::static_depth), fixed_value(SweepParameter::frequency));
  } else if (plan.axes.size() == 1) {
    for (const double v : axis_values[0]) add_point(plan.axes[0].parameter, v, std::nullopt);
  } else {
    for (const double v0 : axis_values[0]) {
      for (const double v1 : axis_values[1]) add_point(plan.axes[0].parameter, v0, std::pair{plan.axes[1].parameter, v1});
    }
  }

  // Distinct runs, in first-use order.
  std::vector<Job> jobs;
  std::map<std::string, std::size_t> job_index;
  auto add_job = [&](PotentialMode mode, const WellParameters& params, std::string key) {
    if (plan.use_cache) {
      if (const auto it = job_index.find(key); it != job_index.end()) return it->second;
      job_index.emplace(key, jobs.size());
    }
    jobs.push_back({std::move(key), mode, params});
    return jobs.size() - 1;
  };

  auto swept = [&](SweepParameter parameter) {
    return std::any_of(plan.axes.begin(), plan.axes.end(), [&](const auto& a) { return a.parameter == parameter; });
  };
  std::vector<Point> points;
  for (const auto& [vs_c2, om_c2] : grid_points) {
    WellParameters params = plan.fixed;
    if (swept(SweepParameter::static_depth)) params.static_depth = vs_c2 * c2;
    if (swept(SweepParameter::frequency)) params.frequency = om_c2 * c2;
    params.validate();
    const std::string vs = hex(params.static_depth);
    const std::string vo = hex(params.oscillating_depth);
    const std::string om = hex(params.frequency);
    Point point{vs_c2, om_c2, 0, 0, 0};
    point.static_job = add_job(PotentialMode::static_only, params, digest + "|static|" + vs);
    point.oscillating_job = add_job(PotentialMode::oscillating_only, params, digest + "|oscillating|" + vo + "|" + om);
    point.combined_job = add_job(PotentialMode::combined, params, digest + "|combined|" + vs + "|" + vo + "|" + om);
    points.push_back(point);
  }

  std::vector<double> results(jobs.size(), 0.0);
  std::vector<std::size_t> pending;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto hit = plan.use_cache && cache != nullptr ? cache->find(jobs[j].key) : std::nullopt;
    if (hit) {
      results[j] = *hit;
    } else {
      pending.push_back(j);
    }
  }

  const auto basis = build_free_basis(plan.grid, plan.speed_of_light, plan.energy_cutoff);
  const std::size_t budget = std::max<std::size_t>(plan.workers, 1);
  const std::size_t outer = std::min(budget, std::max<std::size_t>(pending.size(), 1));
  const std::size_t inner = std::max<std::size_t>(budget / outer, 1);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> completed{jobs.size() - pending.size()};
  std::exception_ptr failure;
  std::string failed_job;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const Job& job = jobs[pending[i]];
      try {
        SimulationOptions options;
        options.snapshot_times = {plan.stepper.duration};
        options.workers = inner;
        options.compute_density = false;
        const double pairs = run_simulation(job.params, plan.stepper, basis, job.mode, options).observables.final_pairs;
        results[pending[i]] = pairs;
        if (plan.use_cache && cache != nullptr) cache->store(job.key, pairs);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
          failed_job = describe(job, c2);
        }
        next = pending.size();
        return;
      }
      const std::size_t done = ++completed;
      if (progress) {
        std::lock_guard lock(failure_mutex);
        progress({done, jobs.size()});
      }
    }
  };

  if (outer <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < outer; ++w) pool.emplace_back(work);
  }

  if (failure) {
    std::string resume = cache != nullptr && !cache->journal().empty()
                             ? "; completed runs are journaled in " + cache->journal().string()
                             : std::string();
    try {
      std::rethrow_exception(failure);
    } catch (const ConfigError& e) {
      throw ConfigError("sweep failed in " + failed_job + ": " + e.what() + resume);
    } catch (const std::exception& e) {
      throw NumericsError("sweep failed in " + failed_job + ": " + e.what() + resume);
    }
  }

  std::vector<SweepRecord> records;
  records.reserve(points.size());
  for (const auto& point : points) {
    SweepRecord record;
    record.static_depth_c2 = point.static_depth_c2;
    record.frequency_c2 = point.frequency_c2;
    record.static_pairs = results[point.static_job];
    record.oscillating_pairs = results[point.oscillating_job];
    record.combined_pairs = results[point.combined_job];
    record.gain = record.combined_pairs - record.static_pairs - record.oscillating_pairs;
    records.push_back(record);
  }
  return records;
}

SweepRecord find_optimum(std::span<const SweepRecord> records) {
  if (records.empty()) throw ConfigError("cannot take the optimum of an empty sweep");
  const SweepRecord* best = &records.front();
  for (const auto& record : records) {
    const bool better = record.gain > best->gain ||
                        (record.gain == best->gain &&
                         (record.frequency_c2 < best->frequency_c2 ||
                          (record.frequency_c2 == best->frequency_c2 && record.static_depth_c2 < best->static_depth_c2)));
    if (better) best = &record;
  }
  return *best;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << "Vs_over_c2,omega_over_c2,N_s,N_o,N_c,dN\n";
  char line[256];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.static_depth_c2, r.frequency_c2,
                  r.static_pairs, r.oscillating_pairs, r.combined_pairs, r.gain);
    out << line;
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "Vs_over_c2,omega_over_c2,N_s,N_o,N_c,dN") {
    throw ConfigError("sweep CSV header mismatch");
  }
  std::vector<SweepRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(parse_number(rest.substr(0, comma), "sweep CSV field"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (fields.size() != 6) throw ConfigError("sweep CSV row " + std::to_string(row) + " does not have 6 fields");
    SweepRecord r{fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]};
    // Each field carries 9 significant digits.
    const double expected = r.combined_pairs - r.static_pairs - r.oscillating_pairs;
    const double slack =
        1e-8 * (std::abs(r.combined_pairs) + std::abs(r.static_pairs) + std::abs(r.oscillating_pairs) + std::abs(r.gain));
    if (std::abs(expected - r.gain) > slack) {
      throw ConfigError("sweep CSV row " + std::to_string(row) + " fails the dN = N_c - N_s - N_o checksum");
    }
    records.push_back(r);
  }
  return records;
}

void write_sweep_metadata(const std::filesystem::path& path, const SweepPlan& plan, double wall_seconds) {
  const double c2 = plan.speed_of_light * plan.speed_of_light;
  nlohmann::ordered_json meta;
  meta["code_version"] = CQFT_VERSION;
  meta["numerics_digest"] = plan.numerics_digest();
  meta["grid"] = {{"L", plan.grid.length()}, {"N_z", plan.grid.size()}};
  meta["stepper"] = {{"dt", plan.stepper.time_step},
                     {"dt_effective", plan.stepper.effective_step()},
                     {"T", plan.stepper.duration},
                     {"midpoint_sampling", plan.stepper.midpoint_sampling}};
  meta["c"] = plan.speed_of_light;
  meta["energy_cutoff_over_c2"] = plan.energy_cutoff ? nlohmann::ordered_json(*plan.energy_cutoff / c2) : nullptr;
  meta["well"] = {{"Vs_over_c2", plan.fixed.static_depth / c2},
                  {"Vo_over_c2", plan.fixed.oscillating_depth / c2},
                  {"omega_over_c2", plan.fixed.frequency / c2},
                  {"D_times_c", plan.fixed.width * plan.speed_of_light},
                  {"W_times_c", plan.fixed.edge_width * plan.speed_of_light},
                  {"shape", to_string(plan.fixed.shape)},
                  {"sign", to_string(plan.fixed.sign)}};
  auto axes = nlohmann::ordered_json::array();
  for (const auto& axis : plan.axes) {
    axes.push_back({{"parameter", parameter_name(axis.parameter)},
                    {"start", axis.start},
                    {"stop", axis.stop},
                    {"step", axis.step}});
  }
  meta["axes"] = axes;
  meta["workers"] = plan.workers;
  meta["wall_time_s"] = wall_seconds;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["timestamp"] = stamp;

  std::ofstream out(path);
  out << meta.dump(2) << '\n';
  if (!out) throw ConfigError("cannot write sweep metadata " + path.string());
}

}  // namespace cqft
