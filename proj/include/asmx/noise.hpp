#pragma once

// Analytic output-noise budget for one softmax branch. Current-noise sources
// (shot, flicker, saturated-channel thermal) are referred to the output node
// through the branch load resistance; the load's own thermal noise appears
// there directly as a voltage source.
//
// RMS terms are combined by linear sum, the convention used for the branch
// budget this module reproduces; the root-sum-of-squares total is reported
// alongside for comparison with the usual uncorrelated-source convention.
//
// Noise of the tail-mirror and load-mirror transistors is not included. In the
// mirrored-load topology the reference-branch noise is amplified by the same
// width ratio as the signal.

#include "asmx/devices.hpp"

#include <span>
#include <string>
#include <vector>

namespace asmx::noise {

/// 4 k_B T R, V^2/Hz
double thermal_psd_resistive(double resistance, const EnvParams& env);

/// 2 q I_D, A^2/Hz
double shot_psd(double drain_current);

/// K_1 I_D / f. K_1 is taken in A (so the result is A^2/Hz).
double flicker_psd(double flicker_constant, double drain_current, double frequency);

/// 4 k_B T g_m / 3, A^2/Hz
double thermal_psd_saturation(double transconductance, const EnvParams& env);

enum class SourceKind { thermal_resistive, thermal_saturation, flicker, shot };

const char* to_string(SourceKind kind);

/// One noise source. `resistance` is the noisy resistor for thermal_resistive
/// and the current-to-voltage referral resistance for every current source.
struct NoiseSourceSpec {
    SourceKind kind = SourceKind::thermal_resistive;
    std::string label;
    double resistance = 0.0;        // ohm
    double transconductance = 0.0;  // S, thermal_saturation
    double drain_current = 0.0;     // A, shot / flicker
    double flicker_constant = 0.0;  // flicker
    double frequency = 0.0;         // Hz, flicker evaluation frequency
    double bandwidth = 1.0;         // Hz
};

struct NoiseTerm {
    std::string label;
    double psd = 0.0;       // V^2/Hz at the output
    double rms = 0.0;       // V
    double fraction = 0.0;  // rms / total_rms
};

struct NoiseBudget {
    std::vector<NoiseTerm> terms;
    double total_rms = 0.0;      // linear sum of term RMS values
    double total_rms_rss = 0.0;  // root-sum-of-squares, for reference
    double total_psd = 0.0;      // sum of term PSDs, V^2/Hz
};

NoiseBudget budget_from_sources(std::span<const NoiseSourceSpec> sources, const EnvParams& env);

/// Shot and load-thermal terms of one branch; a flicker term is added when
/// flicker_constant > 0.
NoiseBudget branch_noise_budget(double load_resistance, double drain_current, double bandwidth,
                                double flicker_constant, double eval_frequency, const EnvParams& env);

/// Source set equivalent to branch_noise_budget.
std::vector<NoiseSourceSpec> branch_sources(double load_resistance, double drain_current, double bandwidth,
                                            double flicker_constant, double eval_frequency);

struct LoadComparison {
    NoiseBudget budget_a;
    NoiseBudget budget_b;
    double snr_delta_db = 0.0;  // 20 log10(total_a / total_b) at equal signal
};

LoadComparison compare_load_budgets(std::span<const NoiseSourceSpec> load_a,
                                    std::span<const NoiseSourceSpec> load_b, const EnvParams& env);

}  // namespace asmx::noise
