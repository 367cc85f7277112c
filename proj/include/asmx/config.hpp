#pragma once

// =============================================================================
// Run configuration files
// =============================================================================
// A small structured-text format (a TOML subset: [sections], key = value,
// strings, numbers, booleans, single-line arrays, # comments). Every physical
// quantity is a string carrying an SI unit suffix, e.g. tail current
// `current = "200nA"`. Dimensionless keys take bare numbers. Unknown keys,
// unknown sections and invariant violations are reported with the line number.
// =============================================================================

#include "asmx/network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asmx::config {

struct SweepSection {
    std::size_t branch = 0;
    double start = 0.0;  // V
    double stop = 0.0;   // V
    int points = 101;
};

struct TransientSection {
    double load_capacitance = 0.0;  // F
    std::size_t branch = 0;         // input that is pulsed and observed
    double low = 0.0;               // V
    double high = 0.0;              // V
    double frequency = 0.0;         // Hz
    double duty = 0.5;
    double periods = 2.0;
    double time_step = 0.0;         // s, 0 = automatic
    double duration = 0.0;          // s, 0 = periods / frequency
    bool noise = false;
    double noise_bandwidth = 0.0;   // Hz, 0 = Nyquist
    std::optional<double> initial_output;
};

struct NoiseSection {
    std::size_t branch = 0;
    double bandwidth = 1.0;          // Hz
    double flicker_constant = 0.0;
    double eval_frequency = 1e3;     // Hz
    std::optional<LoadSpec> compare_load;
};

struct MonteCarloSection {
    double sigma = 0.01;
    int trials = 1000;
    std::vector<double> sigmas;  // optional linearity scan
};

struct MarginSection {
    double v_th_sub = 0.0;
    double v_swing = 0.0;
    int stacked_mirrors = 1;
    double v_th = 0.0;
    double v_overdrive = 0.0;
};

struct RunConfig {
    std::string origin;
    NetworkConfig network;
    double dc_bias = 0.0;
    std::vector<double> inputs;  // explicit vector, or dc_bias on every branch
    std::uint64_t seed = 0;
    double reference_paths = 0.0;
    std::optional<double> reference_power;  // W, reference design figure for comparison

    std::optional<SweepSection> sweep;
    std::optional<TransientSection> transient;
    std::optional<NoiseSection> noise;
    std::optional<MonteCarloSection> montecarlo;
    std::optional<MarginSection> margins;
};

/// Throws ConfigError (with line numbers) for every parse or validation failure.
RunConfig load_config_text(std::string_view text, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);

/// Built-in presets: "bipolar_paper", "nmos_paper".
RunConfig load_preset(const std::string& name);
std::vector<std::string> preset_names();
/// Source text of a built-in preset; throws ConfigError for unknown names.
std::string_view preset_text(const std::string& name);

}  // namespace asmx::config
