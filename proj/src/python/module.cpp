#include "asmx/analysis.hpp"
#include "asmx/config.hpp"
#include "asmx/errors.hpp"
#include "asmx/noise.hpp"
#include "asmx/oracle.hpp"
#include "asmx/runner.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

py::dict operating_point_dict(const asmx::OperatingPoint& op) {
    return py::dict("shared_node_voltage"_a = op.shared_node_voltage, "branch_currents"_a = op.branch_currents,
                    "output_voltages"_a = op.output_voltages, "tail_current"_a = op.tail_current,
                    "kcl_residual"_a = op.kcl_residual, "iterations"_a = op.iterations,
                    "warnings"_a = op.warnings);
}

std::vector<std::vector<double>> rows(const asmx::oracle::Matrix& m) {
    std::vector<std::vector<double>> out(m.rows, std::vector<double>(m.cols));
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = m(i, j);
    }
    return out;
}

std::vector<double> inputs_or_default(const asmx::config::RunConfig& rc, const std::optional<std::vector<double>>& in) {
    return in ? *in : rc.inputs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Differential-pair softmax circuit simulator";

    py::register_exception<asmx::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<asmx::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<asmx::ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    m.def(
        "softmax", [](const std::vector<double>& z, double scale) { return asmx::oracle::softmax(z, scale); },
        "z"_a, "scale"_a = 1.0);
    m.def(
        "softmax_gradient",
        [](const std::vector<double>& z, double scale) { return rows(asmx::oracle::softmax_gradient(z, scale)); },
        "z"_a, "scale"_a = 1.0);
    m.def(
        "square_law_activation",
        [](const std::vector<double>& x, double g) { return asmx::oracle::square_law_activation(x, g); }, "x"_a,
        "g"_a);
    m.def(
        "thermal_voltage",
        [](double temperature) {
            asmx::EnvParams env;
            env.temperature = temperature;
            env.validate();
            return env.thermal_voltage();
        },
        "temperature"_a = 300.0);

    m.def(
        "branch_noise_budget",
        [](double resistance, double current, double bandwidth, double flicker_constant, double eval_frequency,
           double temperature) {
            asmx::EnvParams env;
            env.temperature = temperature;
            const auto b = asmx::noise::branch_noise_budget(resistance, current, bandwidth, flicker_constant,
                                                           eval_frequency, env);
            py::list terms;
            for (const auto& t : b.terms) {
                terms.append(py::dict("label"_a = t.label, "psd"_a = t.psd, "rms"_a = t.rms, "fraction"_a = t.fraction));
            }
            return py::dict("terms"_a = terms, "total_rms"_a = b.total_rms, "total_rms_rss"_a = b.total_rms_rss,
                            "total_psd"_a = b.total_psd);
        },
        "resistance"_a, "current"_a, "bandwidth"_a = 1.0, "flicker_constant"_a = 0.0, "eval_frequency"_a = 1e3,
        "temperature"_a = 300.0);

    m.def("preset_names", &asmx::config::preset_names);
    m.def("preset_text", [](const std::string& name) { return std::string(asmx::config::preset_text(name)); },
          "name"_a);

    py::class_<asmx::config::RunConfig>(m, "Config")
        .def_static("from_preset", &asmx::config::load_preset, "name"_a)
        .def_static(
            "from_text", [](const std::string& text) { return asmx::config::load_config_text(text, "<text>"); },
            "text"_a)
        .def_static("from_file", [](const std::filesystem::path& p) { return asmx::config::load_config(p); },
                    "path"_a)
        .def_property_readonly("class_size", [](const asmx::config::RunConfig& rc) { return rc.network.class_size; })
        .def_property_readonly("technology",
                               [](const asmx::config::RunConfig& rc) { return asmx::to_string(rc.network.technology); })
        .def_property_readonly("softmax_scale",
                               [](const asmx::config::RunConfig& rc) { return rc.network.softmax_scale(); })
        .def_property_readonly("tail_current",
                               [](const asmx::config::RunConfig& rc) { return rc.network.tail.nominal_current; })
        .def_readonly("inputs", &asmx::config::RunConfig::inputs)
        .def_readonly("dc_bias", &asmx::config::RunConfig::dc_bias)
        .def(
            "solve",
            [](const asmx::config::RunConfig& rc, const std::optional<std::vector<double>>& inputs) {
                return operating_point_dict(asmx::solve_operating_point(rc.network, inputs_or_default(rc, inputs)));
            },
            "inputs"_a = py::none())
        .def(
            "closed_form_fractions",
            [](const asmx::config::RunConfig& rc, const std::optional<std::vector<double>>& inputs) {
                return asmx::closed_form_fractions(rc.network, inputs_or_default(rc, inputs));
            },
            "inputs"_a = py::none())
        .def(
            "sweep",
            [](const asmx::config::RunConfig& rc, std::size_t branch, double start, double stop, int points) {
                const auto r = asmx::analysis::sigmoid_sweep(rc.network, branch, start, stop, points, rc.dc_bias);
                return py::dict("swept_input"_a = r.swept_input, "measured_fraction"_a = r.measured_fraction,
                                "ideal_fraction"_a = r.ideal_fraction, "error"_a = r.error,
                                "max_abs_error_pct"_a = r.max_abs_error_pct);
            },
            "branch"_a, "start"_a, "stop"_a, "points"_a = 101)
        .def(
            "monte_carlo",
            [](const asmx::config::RunConfig& rc, double sigma, int trials, std::uint64_t seed) {
                const auto r = asmx::analysis::mismatch_monte_carlo(rc.network, rc.inputs, {sigma, trials, seed});
                return py::dict("trial"_a = r.trial, "max_rel_error"_a = r.max_rel_error, "rejected"_a = r.rejected,
                                "mean"_a = r.mean, "median"_a = r.median, "p95"_a = r.p95);
            },
            "sigma"_a, "trials"_a = 1000, "seed"_a = 0)
        .def(
            "power_estimate",
            [](const asmx::config::RunConfig& rc) {
                return asmx::analysis::power_estimate(rc.network, rc.reference_paths);
            });

    m.def(
        "run",
        [](const std::string& command, const asmx::config::RunConfig& rc, const std::filesystem::path& out_dir,
           std::optional<std::uint64_t> seed, std::optional<int> points, std::optional<int> trials,
           std::optional<double> sigma, std::optional<bool> noise) {
            asmx::RunManifest manifest;
            manifest.command = asmx::parse_command(command);
            manifest.config = rc;
            manifest.output_dir = out_dir;
            asmx::apply_overrides(manifest.config, manifest.command, {seed, points, trials, sigma, noise});
            const auto outcome = asmx::run(manifest);
            return py::make_tuple(outcome.summary, outcome.files);
        },
        "command"_a, "config"_a, "out_dir"_a, "seed"_a = py::none(), "points"_a = py::none(),
        "trials"_a = py::none(), "sigma"_a = py::none(), "noise"_a = py::none(),
        "Runs one analysis, writes summary.txt and its CSV, returns (summary, files).");
}
