#include <fstream>
#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cqft/config.hpp"
#include "cqft/error.hpp"
#include "cqft/observables.hpp"
#include "cqft/spectrum.hpp"
#include "cqft/sweep.hpp"

namespace py = pybind11;
using namespace cqft;

namespace {

py::array_t<double> to_array(const std::vector<double>& values) {
  return py::array_t<double>(static_cast<py::ssize_t>(values.size()), values.data());
}

py::dict simulate(const WellParameters& params, const StepperConfig& stepper, const NumericalGrid& grid,
                  PotentialMode mode, std::vector<double> snapshot_times, std::size_t workers,
                  std::optional<double> energy_cutoff, double speed_of_light) {
  SimulationResult result;
  {
    py::gil_scoped_release release;
    const auto basis = build_free_basis(grid, speed_of_light, energy_cutoff);
    SimulationOptions options;
    options.snapshot_times = std::move(snapshot_times);
    options.workers = workers;
    result = run_simulation(params, stepper, basis, mode, options);
  }
  std::vector<double> times, pairs;
  for (const auto& s : result.observables.series) {
    times.push_back(s.time);
    pairs.push_back(s.pairs);
  }
  py::dict out;
  out["final_pairs"] = result.observables.final_pairs;
  out["times"] = to_array(times);
  out["pairs"] = to_array(pairs);
  out["density"] = to_array(result.observables.density);
  out["column_norms"] = to_array(result.column_norms);
  out["column_completeness"] = to_array(result.column_completeness);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pair production from vacuum in combined static and oscillating Sauter wells";
  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;
  m.attr("__version__") = CQFT_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericsError>(m, "NumericsError", PyExc_ArithmeticError);

  py::enum_<WellShape>(m, "WellShape").value("well", WellShape::well).value("step", WellShape::step);
  py::enum_<SignConvention>(m, "SignConvention")
      .value("as_printed", SignConvention::as_printed)
      .value("negated", SignConvention::negated);
  py::enum_<PotentialMode>(m, "PotentialMode")
      .value("combined", PotentialMode::combined)
      .value("static_only", PotentialMode::static_only)
      .value("oscillating_only", PotentialMode::oscillating_only);

  py::class_<NumericalGrid>(m, "NumericalGrid")
      .def(py::init(&build_grid), py::arg("length") = 1.2, py::arg("points") = 256)
      .def_property_readonly("length", &NumericalGrid::length)
      .def_property_readonly("size", &NumericalGrid::size)
      .def_property_readonly("spacing", &NumericalGrid::spacing)
      .def("positions", [](const NumericalGrid& g) { return to_array(g.positions()); })
      .def("momenta", [](const NumericalGrid& g) { return to_array(g.momenta()); })
      .def("__repr__", [](const NumericalGrid& g) {
        std::ostringstream text;
        text << "NumericalGrid(length=" << g.length() << ", points=" << g.size() << ")";
        return text.str();
      });

  py::class_<WellParameters>(m, "WellParameters", "Well parameters in atomic units")
      .def(py::init<>())
      .def_readwrite("static_depth", &WellParameters::static_depth)
      .def_readwrite("oscillating_depth", &WellParameters::oscillating_depth)
      .def_readwrite("frequency", &WellParameters::frequency)
      .def_readwrite("width", &WellParameters::width)
      .def_readwrite("edge_width", &WellParameters::edge_width)
      .def_readwrite("shape", &WellParameters::shape)
      .def_readwrite("sign", &WellParameters::sign)
      .def("validate", &WellParameters::validate);

  py::class_<StepperConfig>(m, "StepperConfig")
      .def(py::init([](double dt, double duration, bool midpoint) { return StepperConfig{dt, duration, midpoint}; }),
           py::arg("time_step") = 1e-7, py::arg("duration") = 0.002, py::arg("midpoint_sampling") = true)
      .def_readwrite("time_step", &StepperConfig::time_step)
      .def_readwrite("duration", &StepperConfig::duration)
      .def_readwrite("midpoint_sampling", &StepperConfig::midpoint_sampling)
      .def_property_readonly("steps", &StepperConfig::steps);

  m.def(
      "sauter_shape",
      [](py::array_t<double> z, const WellParameters& params) {
        return py::vectorize([&](double zz) { return sauter_shape(zz, params); })(z);
      },
      py::arg("z"), py::arg("params"));
  m.def(
      "potential_at",
      [](py::array_t<double> z, double t, const WellParameters& params, PotentialMode mode) {
        return py::vectorize([&](double zz) { return potential_at(zz, t, params, mode); })(z);
      },
      py::arg("z"), py::arg("t"), py::arg("params"), py::arg("mode") = PotentialMode::combined);

  m.def("simulate", &simulate, py::arg("params"), py::arg("stepper") = StepperConfig{},
        py::arg("grid") = NumericalGrid(1.2, 256), py::arg("mode") = PotentialMode::combined,
        py::arg("snapshot_times") = std::vector<double>{}, py::arg("workers") = 1,
        py::arg("energy_cutoff") = std::nullopt, py::arg("speed_of_light") = kSpeedOfLight,
        "Evolve the negative-energy basis; returns N(t), rho_e(z, T) and diagnostics.");

  m.def(
      "gain_number",
      [](const WellParameters& params, const StepperConfig& stepper, const NumericalGrid& grid, std::size_t workers) {
        py::gil_scoped_release release;
        SimulationOptions options;
        options.snapshot_times = {stepper.duration};
        options.workers = workers;
        options.compute_density = false;
        const auto g = gain_number(params, stepper, build_free_basis(grid), options);
        return std::tuple{g.combined, g.static_only, g.oscillating_only, g.gain};
      },
      py::arg("params"), py::arg("stepper") = StepperConfig{}, py::arg("grid") = NumericalGrid(1.2, 256),
      py::arg("workers") = 1, "Returns (N_c, N_s, N_o, dN).");

  m.def(
      "bound_spectrum",
      [](double depth, const NumericalGrid& grid, const WellParameters& params) {
        py::gil_scoped_release release;
        return bound_spectrum(depth, grid, params);
      },
      py::arg("depth"), py::arg("grid") = NumericalGrid(1.2, 256), py::arg("params") = WellParameters{});
  m.def(
      "critical_depth",
      [](const NumericalGrid& grid, const WellParameters& params, double low, double high, double tol) {
        py::gil_scoped_release release;
        return critical_depth(grid, params, low, high, tol);
      },
      py::arg("grid") = NumericalGrid(1.2, 256), py::arg("params") = WellParameters{},
      py::arg("low") = 1.9 * kSpeedOfLight * kSpeedOfLight, py::arg("high") = 2.2 * kSpeedOfLight * kSpeedOfLight,
      py::arg("tol") = 0.005 * kSpeedOfLight * kSpeedOfLight);

  py::enum_<SweepParameter>(m, "SweepParameter")
      .value("static_depth", SweepParameter::static_depth)
      .value("frequency", SweepParameter::frequency);
  py::class_<SweepAxis>(m, "SweepAxis")
      .def(py::init(&parse_axis), py::arg("text"))
      .def_readonly("parameter", &SweepAxis::parameter)
      .def_readonly("start", &SweepAxis::start)
      .def_readonly("stop", &SweepAxis::stop)
      .def_readonly("step", &SweepAxis::step)
      .def("values", &SweepAxis::values);

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("static_depth_c2", &SweepRecord::static_depth_c2)
      .def_readonly("frequency_c2", &SweepRecord::frequency_c2)
      .def_readonly("static_pairs", &SweepRecord::static_pairs)
      .def_readonly("oscillating_pairs", &SweepRecord::oscillating_pairs)
      .def_readonly("combined_pairs", &SweepRecord::combined_pairs)
      .def_readonly("gain", &SweepRecord::gain)
      .def("__eq__", [](const SweepRecord& a, const SweepRecord& b) { return a == b; })
      .def("__repr__", [](const SweepRecord& r) {
        char text[200];
        std::snprintf(text, sizeof text, "SweepRecord(Vs=%g, omega=%g, N_s=%.6g, N_o=%.6g, N_c=%.6g, dN=%.6g)",
                      r.static_depth_c2, r.frequency_c2, r.static_pairs, r.oscillating_pairs, r.combined_pairs,
                      r.gain);
        return std::string(text);
      });

  m.def(
      "run_sweep",
      [](const std::vector<std::string>& axes, const WellParameters& fixed, const NumericalGrid& grid,
         const StepperConfig& stepper, std::size_t workers, bool use_cache) {
        SweepPlan plan;
        for (const auto& text : axes) plan.axes.push_back(parse_axis(text));
        plan.fixed = fixed;
        plan.grid = grid;
        plan.stepper = stepper;
        plan.workers = workers;
        plan.use_cache = use_cache;
        py::gil_scoped_release release;
        return run_sweep(plan);
      },
      py::arg("axes"), py::arg("fixed") = WellParameters{}, py::arg("grid") = NumericalGrid(1.2, 256),
      py::arg("stepper") = StepperConfig{}, py::arg("workers") = 1, py::arg("use_cache") = true,
      "Scan V_s and/or omega given as 'Vs=start:stop:step' / 'omega=...' in units of c^2.");
  m.def(
      "find_optimum", [](const std::vector<SweepRecord>& records) { return find_optimum(records); },
      py::arg("records"));
  m.def(
      "write_sweep_csv",
      [](const std::filesystem::path& path, const std::vector<SweepRecord>& records) {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write " + path.string());
        write_sweep_csv(out, records);
      },
      py::arg("path"), py::arg("records"));
  m.def(
      "read_sweep_csv",
      [](const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read " + path.string());
        return read_sweep_csv(in);
      },
      py::arg("path"));

  m.def(
      "parse_config", [](const std::string& text) { return render_config(parse_config(text)); }, py::arg("text"),
      "Parse key = value text and return its canonical rendering (raises ConfigError on bad input).");
}
