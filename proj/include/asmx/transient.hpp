#pragma once

// =============================================================================
// Time-domain response of the network into its R-C output branch
// =============================================================================
// The branch core is quasi-static: at every step the DC operating point is
// re-solved for the present inputs. Only the output node integrates, through
// the exact update for a current source driving R || C:
//
//     V(t+h) = V_f + (V(t) - V_f) exp(-h / RC),    V_f = I * gain * R
//
// Device and shared-node capacitances are not modeled, so settling reflects
// the output pole alone. Optional white noise (shot + load thermal, flicker
// excluded) is added to V_f each step with variance PSD * bandwidth.
// =============================================================================

#include "asmx/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace asmx {

/// Piecewise-constant schedule. The value before the first breakpoint is the
/// first breakpoint's value. A breakpoint within 1e-12 relative of the query
/// time counts as reached, so edges placed on a time grid land on that grid.
class Waveform {
public:
    Waveform() = default;
    explicit Waveform(std::vector<std::pair<double, double>> breakpoints);

    static Waveform constant(double value);

    /// Square wave starting at `low` (or `high` when start_high), switching
    /// every duty*period / (1-duty)*period until `duration`.
    static Waveform pulse(double low, double high, double frequency, double duty, double duration,
                          bool start_high = false);

    [[nodiscard]] double value_at(double t) const;
    [[nodiscard]] const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

struct TransientConfig {
    NetworkConfig network;
    double load_capacitance = 0.0;  // F
    std::vector<Waveform> input_waveforms;
    double time_step = 0.0;  // s
    double duration = 0.0;   // s
    std::size_t observed_branch = 0;
    bool noise_enabled = false;
    double noise_bandwidth = 0.0;  // Hz; <= 0 selects the Nyquist bandwidth 1/(2h)
    std::uint64_t rng_seed = 0;
    std::optional<double> initial_output;  // V; default is the DC value of the t=0 inputs
    SolverOptions solver;

    void validate() const;

    /// Resistance of the R-C output branch (mirror load resistor, or the
    /// branch load itself for resistor / triode loads).
    [[nodiscard]] double output_resistance() const;
    [[nodiscard]] double time_constant() const { return output_resistance() * load_capacitance; }
};

struct TransientResult {
    std::vector<double> times;
    std::vector<double> output_voltage;  // with noise when enabled
    std::vector<double> branch_current;  // observed branch, before mirror gain
    std::vector<double> clean_output;    // noise-free trajectory
    std::vector<double> target_output;   // V_f held over [t_n, t_n+1)

    std::optional<double> settle_time_998;  // first transition, 99.8% of the step
    std::optional<double> rise_time_1090;   // first rising transition
    std::optional<double> fall_time_9010;   // first falling transition
    double snr_db = 0.0;
    double noise_error_pct = 0.0;
    double snr_window_start = 0.0;
    double snr_window_end = 0.0;
};

struct SnrMeasurement {
    double snr_db = 0.0;           // 20 log10(mean|V| / stddev V); +inf for zero spread
    double noise_error_pct = 0.0;  // 100 (max - min) / (2 mean|V|)
    std::size_t samples = 0;
};

TransientResult run_transient(const TransientConfig& config);

SnrMeasurement measure_snr(std::span<const double> samples);

/// Statistics over samples with window_start <= t <= window_end.
SnrMeasurement measure_snr(const TransientResult& result, double window_start, double window_end);

/// tau/100, shrunk so that `edge_spacing` (when > 0) is an integer number of steps.
double default_time_step(double time_constant, double edge_spacing);

}  // namespace asmx
