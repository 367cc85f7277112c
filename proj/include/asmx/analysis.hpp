#pragma once

// Evaluation procedures run on top of the network solver: sigmoid-sweep
// accuracy scoring, compute-regime classification, device-mismatch analysis
// (first-order, closed-form and Monte-Carlo), supply margins and power.

#include "asmx/network.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace asmx::analysis {

// -----------------------------------------------------------------------------
// Sigmoid sweep
// -----------------------------------------------------------------------------

struct SweepResult {
    std::vector<double> swept_input;
    std::vector<double> measured_fraction;  // output / (I_tail,nominal * output transresistance)
    std::vector<double> ideal_fraction;
    std::vector<double> error;              // measured - ideal
    double max_abs_error_pct = 0.0;
    std::vector<std::string> warnings;      // de-duplicated solver diagnostics
};

/// Holds every other input at `dc_bias`, sweeps `branch_index` over
/// [start, stop] in `points` evenly spaced steps and scores the normalized
/// branch output against the collapsed sigmoid.
SweepResult sigmoid_sweep(const NetworkConfig& config, std::size_t branch_index, double start, double stop,
                          int points, double dc_bias, const SolverOptions& options = {});

// -----------------------------------------------------------------------------
// Compute regimes
// -----------------------------------------------------------------------------

enum class ComputeRegime { well_matched, single_dominant, intermediate };

const char* to_string(ComputeRegime regime);

/// single_dominant when the largest softmax output reaches `dominant`;
/// well_matched when it stays at or below matched_factor / N.
struct RegimeThresholds {
    double dominant = 0.9;
    double matched_factor = 1.5;
};

ComputeRegime classify_compute(std::span<const double> inputs, double scale, const RegimeThresholds& thresholds = {});

// -----------------------------------------------------------------------------
// Mismatch
// -----------------------------------------------------------------------------

/// Relative branch error predicted when the mismatch-weighted sum over all
/// branches is assumed to vanish: simply delta_c_rel.
double mismatch_first_order_error(double delta_c_rel, std::span<const double> inputs,
                                  const NetworkConfig& config, std::size_t branch_index);

/// Relative error of branch `branch_index` from the unsimplified mismatch
/// expression: (1 + d_i) sum_k e_k / sum_k (1 + d_k) e_k - 1, e_k = exp(x_k/scale).
double mismatch_closed_form_error(std::span<const double> delta_c_rel, std::span<const double> inputs,
                                  double scale, std::size_t branch_index);

/// Same quantity obtained by solving the network twice (with and without the
/// prefactor offsets) and comparing branch currents.
double mismatch_network_error(const NetworkConfig& config, std::span<const double> inputs,
                              std::span<const double> delta_c_rel, std::size_t branch_index,
                              const SolverOptions& options = {});

struct MismatchSpec {
    double sigma_rel = 0.0;
    int trials = 1;
    std::uint64_t rng_seed = 0;
};

struct MonteCarloResult {
    std::vector<std::size_t> trial;       // indices of accepted trials
    std::vector<double> max_rel_error;    // max_k |I_k - I_k,ideal| / I_k,ideal
    std::size_t rejected = 0;             // draws with a non-positive prefactor
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;
};

/// Trial t draws d_k = sigma * N(0,1) from counter (seed, t*N + k), scales
/// every branch prefactor by (1 + d_k) and solves the full network.
MonteCarloResult mismatch_monte_carlo(const NetworkConfig& config, std::span<const double> inputs,
                                      const MismatchSpec& spec, const SolverOptions& options = {});

struct SigmaScan {
    std::vector<double> sigmas;
    std::vector<double> mean_errors;
    double slope = 0.0;      // least squares through the origin
    double r_squared = 0.0;  // 1 - SS_res / SS_tot (centered)
};

SigmaScan mismatch_sigma_scan(const NetworkConfig& config, std::span<const double> inputs,
                              std::span<const double> sigmas, int trials, std::uint64_t seed,
                              const SolverOptions& options = {});

/// Linear-interpolated percentile of unsorted data, q in [0, 100].
double percentile(std::vector<double> data, double q);

// -----------------------------------------------------------------------------
// Supply margin and power
// -----------------------------------------------------------------------------

/// Minimum supply for weak-inversion stacks: 2 V_TH,sub per stacked mirror
/// plus the output swing plus 200 mV drain headroom. stacked_mirrors is 1
/// (tail only) or 2 (tail and cascode load).
double supply_margin(double v_th_sub, double v_swing, int stacked_mirrors);

/// Source-node minimum for an above-threshold mirror, V_TH + 2 V_OV.
double saturation_source_minimum(double v_th, double v_overdrive);

struct MarginReport {
    double subthreshold_minimum = 0.0;
    double saturation_source_minimum = 0.0;
    double supply = 0.0;
    bool exceeds_supply = false;
};

MarginReport margin_report(double v_th_sub, double v_swing, int stacked_mirrors, double v_th, double v_overdrive,
                           double supply);

/// (V_high - V_low) * I_tail * (1 + reference_paths), plus width_ratio * I_tail
/// for the copied output current of a mirrored load.
double power_estimate(const NetworkConfig& config, double reference_paths);

}  // namespace asmx::analysis
