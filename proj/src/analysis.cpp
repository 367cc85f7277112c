#include "asmx/analysis.hpp"

#include "asmx/errors.hpp"
#include "asmx/oracle.hpp"
#include "asmx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace asmx::analysis {

SweepResult sigmoid_sweep(const NetworkConfig& config, std::size_t branch_index, double start, double stop,
                          int points, double dc_bias, const SolverOptions& options) {
    config.validate();
    if (branch_index >= static_cast<std::size_t>(config.class_size)) {
        throw DomainError("sigmoid_sweep: branch_index out of range");
    }
    if (points < 3) {
        throw DomainError("sigmoid_sweep: need at least 3 points");
    }
    const double rail_lo = config.v_supply_low;
    const double rail_hi = config.v_supply_high;
    for (double v : {start, stop, dc_bias}) {
        if (!std::isfinite(v) || v < rail_lo || v > rail_hi) {
            throw DomainError("sigmoid_sweep: sweep range and bias must lie within the supply rails");
        }
    }

    const double full_scale = config.tail.nominal_current * config.output_transresistance();
    const double scale = config.softmax_scale();
    std::vector<double> inputs(static_cast<std::size_t>(config.class_size), dc_bias);

    SweepResult out;
    double max_err = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
        inputs[branch_index] = x;
        OperatingPoint op;
        try {
            op = solve_operating_point(config, inputs, options);
        } catch (const ConvergenceError& e) {
            std::ostringstream msg;
            msg << "sweep point " << x << " V: " << e.what();
            throw ConvergenceError(msg.str());
        }
        for (auto& w : op.warnings) {
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end() &&
                out.warnings.size() < 16) {
                out.warnings.push_back(std::move(w));
            }
        }
        const double measured = op.output_voltages[branch_index] / full_scale;
        const double ideal = oracle::sigmoid_reference(x, dc_bias, scale, config.class_size);
        out.swept_input.push_back(x);
        out.measured_fraction.push_back(measured);
        out.ideal_fraction.push_back(ideal);
        out.error.push_back(measured - ideal);
        max_err = std::max(max_err, std::abs(measured - ideal));
    }
    out.max_abs_error_pct = 100.0 * max_err;
    return out;
}

const char* to_string(ComputeRegime regime) {
    switch (regime) {
        case ComputeRegime::well_matched: return "well_matched";
        case ComputeRegime::single_dominant: return "single_dominant";
        case ComputeRegime::intermediate: return "intermediate";
    }
    return "?";
}

ComputeRegime classify_compute(std::span<const double> inputs, double scale, const RegimeThresholds& thresholds) {
    const auto s = oracle::softmax(inputs, scale);
    const double peak = *std::max_element(s.begin(), s.end());
    if (peak >= thresholds.dominant) {
        return ComputeRegime::single_dominant;
    }
    if (peak <= thresholds.matched_factor / static_cast<double>(s.size())) {
        return ComputeRegime::well_matched;
    }
    return ComputeRegime::intermediate;
}

double mismatch_first_order_error(double delta_c_rel, std::span<const double> inputs, const NetworkConfig& config,
                                  std::size_t branch_index) {
    if (!(std::abs(delta_c_rel) < 1.0)) {
        throw DomainError("mismatch_first_order_error: |delta_c/C| must be below 1");
    }
    if (inputs.size() != static_cast<std::size_t>(config.class_size) || branch_index >= inputs.size()) {
        throw DomainError("mismatch_first_order_error: inputs or branch index do not match the network");
    }
    return delta_c_rel;
}

double mismatch_closed_form_error(std::span<const double> delta_c_rel, std::span<const double> inputs, double scale,
                                  std::size_t branch_index) {
    if (delta_c_rel.size() != inputs.size() || branch_index >= inputs.size()) {
        throw DomainError("mismatch_closed_form_error: size mismatch");
    }
    const auto weights = oracle::softmax(inputs, scale);  // e_k / sum e
    double weighted = 0.0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        weighted += (1.0 + delta_c_rel[k]) * weights[k];
    }
    return (1.0 + delta_c_rel[branch_index]) / weighted - 1.0;
}

double mismatch_network_error(const NetworkConfig& config, std::span<const double> inputs,
                              std::span<const double> delta_c_rel, std::size_t branch_index,
                              const SolverOptions& options) {
    if (delta_c_rel.size() != inputs.size() || branch_index >= inputs.size()) {
        throw DomainError("mismatch_network_error: size mismatch");
    }
    const OperatingPoint ideal = solve_operating_point(config, inputs, options);
    NetworkConfig skewed = config;
    for (std::size_t k = 0; k < delta_c_rel.size(); ++k) {
        if (!(1.0 + delta_c_rel[k] > 0.0)) {
            throw DomainError("mismatch_network_error: prefactor would be non-positive");
        }
        scale_prefactor(skewed.branch_devices[k], 1.0 + delta_c_rel[k]);
    }
    const OperatingPoint actual = solve_operating_point(skewed, inputs, options);
    return actual.branch_currents[branch_index] / ideal.branch_currents[branch_index] - 1.0;
}

double percentile(std::vector<double> data, double q) {
    if (data.empty()) {
        throw DomainError("percentile: empty data");
    }
    std::sort(data.begin(), data.end());
    const double pos = q / 100.0 * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, data.size() - 1);
    return data[lo] + (pos - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

MonteCarloResult mismatch_monte_carlo(const NetworkConfig& config, std::span<const double> inputs,
                                      const MismatchSpec& spec, const SolverOptions& options) {
    if (spec.trials < 1) {
        throw DomainError("mismatch_monte_carlo: trials must be at least 1");
    }
    if (!(spec.sigma_rel >= 0.0) || !std::isfinite(spec.sigma_rel)) {
        throw DomainError("mismatch_monte_carlo: sigma_rel must be non-negative");
    }
    const OperatingPoint ideal = solve_operating_point(config, inputs, options);
    const std::size_t n = inputs.size();

    MonteCarloResult out;
    std::vector<double> offsets(n);
    for (int t = 0; t < spec.trials; ++t) {
        bool rejected = false;
        for (std::size_t k = 0; k < n; ++k) {
            const auto counter = static_cast<std::uint64_t>(t) * n + k;
            offsets[k] = spec.sigma_rel * rng::normal(spec.rng_seed, 1, counter);
            rejected = rejected || !(1.0 + offsets[k] > 0.0);
        }
        if (rejected) {
            ++out.rejected;
            continue;
        }
        NetworkConfig trial_cfg = config;
        for (std::size_t k = 0; k < n; ++k) {
            scale_prefactor(trial_cfg.branch_devices[k], 1.0 + offsets[k]);
        }
        const OperatingPoint op = solve_operating_point(trial_cfg, inputs, options);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(op.branch_currents[k] - ideal.branch_currents[k]) /
                                        ideal.branch_currents[k]);
        }
        out.trial.push_back(static_cast<std::size_t>(t));
        out.max_rel_error.push_back(worst);
    }
    if (!out.max_rel_error.empty()) {
        out.mean = std::accumulate(out.max_rel_error.begin(), out.max_rel_error.end(), 0.0) /
                   static_cast<double>(out.max_rel_error.size());
        out.median = percentile(out.max_rel_error, 50.0);
        out.p95 = percentile(out.max_rel_error, 95.0);
    }
    return out;
}

SigmaScan mismatch_sigma_scan(const NetworkConfig& config, std::span<const double> inputs,
                              std::span<const double> sigmas, int trials, std::uint64_t seed,
                              const SolverOptions& options) {
    if (sigmas.size() < 2) {
        throw DomainError("mismatch_sigma_scan: need at least two sigma values");
    }
    SigmaScan scan;
    for (double s : sigmas) {
        const auto mc = mismatch_monte_carlo(config, inputs, {s, trials, seed}, options);
        scan.sigmas.push_back(s);
        scan.mean_errors.push_back(mc.mean);
    }
    double sxy = 0.0;
    double sxx = 0.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < scan.sigmas.size(); ++i) {
        sxy += scan.sigmas[i] * scan.mean_errors[i];
        sxx += scan.sigmas[i] * scan.sigmas[i];
        ybar += scan.mean_errors[i];
    }
    ybar /= static_cast<double>(scan.sigmas.size());
    scan.slope = sxy / sxx;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < scan.sigmas.size(); ++i) {
        const double fit = scan.slope * scan.sigmas[i];
        ss_res += (scan.mean_errors[i] - fit) * (scan.mean_errors[i] - fit);
        ss_tot += (scan.mean_errors[i] - ybar) * (scan.mean_errors[i] - ybar);
    }
    scan.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return scan;
}

double supply_margin(double v_th_sub, double v_swing, int stacked_mirrors) {
    if (v_th_sub < 0.0 || v_swing < 0.0) {
        throw DomainError("supply_margin: voltages must be non-negative");
    }
    if (stacked_mirrors != 1 && stacked_mirrors != 2) {
        throw DomainError("supply_margin: stacked_mirrors must be 1 or 2");
    }
    constexpr double kDrainHeadroom = 0.2;  // V, keeps v_ds well above 3 V_T
    return 2.0 * v_th_sub * stacked_mirrors + v_swing + kDrainHeadroom;
}

double saturation_source_minimum(double v_th, double v_overdrive) {
    if (v_th < 0.0 || v_overdrive < 0.0) {
        throw DomainError("saturation_source_minimum: voltages must be non-negative");
    }
    return v_th + 2.0 * v_overdrive;
}

MarginReport margin_report(double v_th_sub, double v_swing, int stacked_mirrors, double v_th, double v_overdrive,
                           double supply) {
    MarginReport r;
    r.subthreshold_minimum = supply_margin(v_th_sub, v_swing, stacked_mirrors);
    r.saturation_source_minimum = saturation_source_minimum(v_th, v_overdrive);
    r.supply = supply;
    r.exceeds_supply = r.subthreshold_minimum > supply;
    return r;
}

double power_estimate(const NetworkConfig& config, double reference_paths) {
    if (reference_paths < 0.0) {
        throw DomainError("power_estimate: reference_paths must be non-negative");
    }
    double paths = 1.0 + reference_paths;
    if (const auto* m = std::get_if<MirroredLoad>(&config.load)) {
        paths += m->width_ratio;
    }
    return (config.v_supply_high - config.v_supply_low) * config.tail.nominal_current * paths;
}

}  // namespace asmx::analysis
