#include "asmx/network.hpp"

#include "asmx/errors.hpp"
#include "asmx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace asmx {

namespace {

[[noreturn]] void config_fail(const std::string& field, const std::string& message) {
    throw ConfigError("network", 0, field + ": " + message);
}

struct BranchSolution {
    double current = 0.0;
    double d_dv = 0.0;  // dI/dv_shared along the load line
};

CurrentSample device_sample(const NetworkConfig& config, std::size_t k, double v_control, double v_output) {
    return std::visit(
        [&](const auto& dev) -> CurrentSample {
            using T = std::decay_t<decltype(dev)>;
            if constexpr (std::is_same_v<T, NpnParams>) {
                return npn_collector_sample(dev, config.env, v_control, v_output);
            } else {
                return nmos_subthreshold_sample(dev, config.env, v_control, v_output);
            }
        },
        config.branch_devices[k]);
}

BranchSolution solve_branch(const NetworkConfig& config, std::size_t k, double input, double v_shared,
                            double r_drain, const SolverOptions& options) {
    const double v_control = input - v_shared;
    const double v_high = config.v_supply_high;
    auto at_current = [&](double i) { return device_sample(config, k, v_control, v_high - i * r_drain - v_shared); };

    const CurrentSample open = at_current(0.0);
    if (!(open.current > 0.0)) {
        return {0.0, 0.0};
    }
    if (!std::isfinite(open.current)) {
        return {open.current, 0.0};
    }
    if (r_drain == 0.0) {
        return {open.current, -(open.d_control + open.d_output)};
    }

    // g(I) = I - f(V_high - I R - v) is increasing in I, negative at 0 and
    // non-negative at f(V_high - v): safeguarded Newton inside that bracket.
    double lo = 0.0;
    double hi = open.current;
    double current = open.current;
    double step_before_last = hi - lo;
    double last_step = step_before_last;
    bool converged = false;
    for (int it = 0; it < options.inner_max_iterations; ++it) {
        const CurrentSample s = at_current(current);
        const double g = current - s.current;
        if (g == 0.0) {
            converged = true;
            break;
        }
        (g > 0.0 ? hi : lo) = current;
        const double slope = 1.0 + r_drain * s.d_output;
        double next = current - g / slope;
        // Bisect when Newton leaves the bracket or stops halving the step.
        if (!(next > lo && next < hi) || std::abs(2.0 * g) > std::abs(step_before_last * slope)) {
            next = 0.5 * (lo + hi);
        }
        step_before_last = last_step;
        last_step = std::abs(next - current);
        const bool small = std::abs(next - current) <= options.inner_relative_tolerance * std::abs(next);
        current = next;
        if (small || hi - lo <= options.inner_relative_tolerance * hi) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceError("branch " + std::to_string(k) + ": load-line fixed point did not converge in " +
                               std::to_string(options.inner_max_iterations) + " iterations");
    }
    const CurrentSample s = at_current(current);
    return {current, -(s.d_control + s.d_output) / (1.0 + r_drain * s.d_output)};
}

void check_inputs(const NetworkConfig& config, std::span<const double> inputs) {
    if (inputs.size() != static_cast<std::size_t>(config.class_size)) {
        throw DomainError("input vector has " + std::to_string(inputs.size()) + " elements, class_size is " +
                          std::to_string(config.class_size));
    }
    for (double x : inputs) {
        if (!std::isfinite(x)) {
            throw DomainError("non-finite input voltage");
        }
    }
}

double resolve_tolerance(const NetworkConfig& config, const SolverOptions& options) {
    return options.tolerance > 0.0 ? options.tolerance : 1e-6 * config.tail.nominal_current;
}

struct KclSample {
    double branch_sum = 0.0;
    double branch_slope = 0.0;
    double tail = 0.0;
    double tail_slope = 0.0;
    std::vector<double> currents;

    [[nodiscard]] double residual() const { return branch_sum - tail; }
};

KclSample evaluate_kcl(const NetworkConfig& config, std::span<const double> inputs, double v_shared,
                       const SolverOptions& options) {
    const double r_drain = config.drain_resistance();
    KclSample out;
    out.currents.resize(inputs.size());
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const BranchSolution b = solve_branch(config, k, inputs[k], v_shared, r_drain, options);
        out.currents[k] = b.current;
        out.branch_sum += b.current;
        out.branch_slope += b.d_dv;
    }
    out.tail = tail_current(config.tail, v_shared);
    out.tail_slope = tail_current_slope(config.tail);
    return out;
}

}  // namespace

void NetworkConfig::validate() const {
    if (class_size < 2) {
        config_fail("class_size", "must be at least 2 (got " + std::to_string(class_size) + ")");
    }
    if (branch_devices.size() != static_cast<std::size_t>(class_size)) {
        config_fail("branch_devices", "has " + std::to_string(branch_devices.size()) +
                                          " entries, class_size is " + std::to_string(class_size));
    }
    for (std::size_t k = 0; k < branch_devices.size(); ++k) {
        const bool npn = std::holds_alternative<NpnParams>(branch_devices[k]);
        if (npn != (technology == Technology::bipolar)) {
            config_fail("branch_devices[" + std::to_string(k) + "]",
                        std::string("device record does not match technology ") + to_string(technology));
        }
        try {
            std::visit([](const auto& d) { d.validate(); }, branch_devices[k]);
        } catch (const DomainError& e) {
            config_fail("branch_devices[" + std::to_string(k) + "]", e.what());
        }
    }
    if (!(v_supply_high > v_supply_low)) {
        config_fail("v_supply_high", "must exceed v_supply_low");
    }
    try {
        env.validate();
        tail.validate();
    } catch (const DomainError& e) {
        config_fail("tail/env", e.what());
    }
    std::visit(
        [this](const auto& load) {
            using T = std::decay_t<decltype(load)>;
            if constexpr (std::is_same_v<T, ResistorLoad>) {
                if (!(load.resistance > 0.0) || !std::isfinite(load.resistance)) {
                    config_fail("load.resistance", "must be positive");
                }
            } else if constexpr (std::is_same_v<T, PmosLinearLoad>) {
                try {
                    load.params.validate();
                    (void)pmos_linear_resistance(load.params, v_supply_high, v_supply_low);
                } catch (const DomainError& e) {
                    config_fail("load", e.what());
                }
            } else {
                if (!(load.load_resistance > 0.0) || !std::isfinite(load.load_resistance)) {
                    config_fail("load.load_resistance", "must be positive");
                }
                if (!(load.width_ratio > 0.0) || !std::isfinite(load.width_ratio)) {
                    config_fail("load.width_ratio", "must be positive");
                }
            }
        },
        load);
}

double NetworkConfig::drain_resistance() const {
    return std::visit(
        [this](const auto& load) -> double {
            using T = std::decay_t<decltype(load)>;
            if constexpr (std::is_same_v<T, ResistorLoad>) {
                return load.resistance;
            } else if constexpr (std::is_same_v<T, PmosLinearLoad>) {
                return pmos_linear_resistance(load.params, v_supply_high, v_supply_low);
            } else {
                return 0.0;
            }
        },
        load);
}

double NetworkConfig::output_transresistance() const {
    if (const auto* m = std::get_if<MirroredLoad>(&load)) {
        return m->width_ratio * m->load_resistance;
    }
    return drain_resistance();
}

double NetworkConfig::softmax_scale() const {
    const double vt = env.thermal_voltage();
    if (technology == Technology::bipolar) {
        return vt;
    }
    return std::get<NmosParams>(branch_devices.front()).subthreshold_swing * vt;
}

NetworkConfig make_network(Technology technology, int class_size, const DeviceParams& device, LoadSpec load,
                           TailSourceSpec tail, double v_supply_high, double v_supply_low, EnvParams env) {
    NetworkConfig cfg;
    cfg.class_size = class_size;
    cfg.technology = technology;
    cfg.branch_devices.assign(static_cast<std::size_t>(std::max(class_size, 0)), device);
    cfg.load = load;
    cfg.tail = tail;
    cfg.v_supply_high = v_supply_high;
    cfg.v_supply_low = v_supply_low;
    cfg.env = env;
    return cfg;
}

void scale_prefactor(DeviceParams& device, double factor) {
    std::visit(
        [factor](auto& dev) {
            using T = std::decay_t<decltype(dev)>;
            if constexpr (std::is_same_v<T, NpnParams>) {
                dev.saturation_current *= factor;
            } else {
                dev.wl_ratio *= factor;
            }
        },
        device);
}

const char* to_string(Technology technology) {
    return technology == Technology::bipolar ? "bipolar" : "nmos";
}

std::vector<double> closed_form_fractions(const NetworkConfig& config, std::span<const double> inputs) {
    config.validate();
    check_inputs(config, inputs);
    if (config.technology == Technology::nmos) {
        const double n0 = std::get<NmosParams>(config.branch_devices.front()).subthreshold_swing;
        for (const auto& d : config.branch_devices) {
            if (std::get<NmosParams>(d).subthreshold_swing != n0) {
                throw DomainError("closed_form_fractions: branches disagree on subthreshold_swing");
            }
        }
    }
    return oracle::softmax(inputs, config.softmax_scale());
}

std::pair<double, double> shared_node_bracket(std::span<const double> inputs) {
    const auto [lo, hi] = std::minmax_element(inputs.begin(), inputs.end());
    return {*lo - 1.0, *hi};
}

double branch_current(const NetworkConfig& config, std::size_t k, double input, double v_shared,
                      const SolverOptions& options) {
    if (k >= config.branch_devices.size()) {
        throw DomainError("branch_current: branch index out of range");
    }
    return solve_branch(config, k, input, v_shared, config.drain_resistance(), options).current;
}

double kcl_residual(const NetworkConfig& config, std::span<const double> inputs, double v_shared,
                    const SolverOptions& options) {
    check_inputs(config, inputs);
    return evaluate_kcl(config, inputs, v_shared, options).residual();
}

OperatingPoint solve_operating_point(const NetworkConfig& config, std::span<const double> inputs,
                                     const SolverOptions& options) {
    config.validate();
    check_inputs(config, inputs);
    const double tol = resolve_tolerance(config, options);

    auto [lo, hi] = shared_node_bracket(inputs);
    const KclSample at_lo = evaluate_kcl(config, inputs, lo, options);
    const KclSample at_hi = evaluate_kcl(config, inputs, hi, options);
    if (!(at_lo.residual() > 0.0) || !(at_hi.residual() < 0.0)) {
        std::ostringstream msg;
        msg << "no sign change of the KCL residual in bracket [" << lo << " V, " << hi
            << " V]: residual(lo) = " << at_lo.residual() << " A, residual(hi) = " << at_hi.residual() << " A";
        throw ConvergenceError(msg.str());
    }

    // Newton on h(v) = ln(sum I_k) - ln(I_tail), which is exactly linear in v
    // for ideal exponential devices; bisection whenever a step leaves the bracket.
    constexpr double kStepTolerance = 1e-13;  // V
    double v = 0.5 * (lo + hi);
    KclSample sample;
    bool converged = false;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        sample = evaluate_kcl(config, inputs, v, options);
        const double r = sample.residual();
        if (r == 0.0) {
            converged = true;
            break;
        }
        (r > 0.0 ? lo : hi) = v;

        double next = std::numeric_limits<double>::quiet_NaN();
        if (sample.branch_sum > 0.0 && sample.tail > 0.0 && std::isfinite(sample.branch_sum)) {
            const double h = std::log(sample.branch_sum) - std::log(sample.tail);
            const double dh = sample.branch_slope / sample.branch_sum - sample.tail_slope / sample.tail;
            if (dh < 0.0 && std::isfinite(dh)) {
                next = v - h / dh;
            }
        }
        const bool newton_ok = next >= lo && next <= hi;
        const double step = newton_ok ? std::abs(next - v) : std::numeric_limits<double>::infinity();
        if (std::abs(r) <= tol && step <= kStepTolerance) {
            converged = true;
            break;
        }
        if (!newton_ok || next == lo || next == hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
            v = next;
            sample = evaluate_kcl(config, inputs, v, options);
            converged = std::abs(sample.residual()) <= tol;
            break;
        }
        v = next;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "shared-node root-find did not converge after " << it << " iterations (v = " << v
            << " V, residual = " << sample.residual() << " A, tol = " << tol << " A)";
        throw ConvergenceError(msg.str());
    }

    OperatingPoint op;
    op.shared_node_voltage = v;
    op.branch_currents = sample.currents;
    op.tail_current = sample.tail;
    op.kcl_residual = sample.residual();
    op.iterations = it + 1;

    const double r_drain = config.drain_resistance();
    const double r_out = config.output_transresistance();
    op.output_voltages.resize(op.branch_currents.size());
    op.base_currents.assign(op.branch_currents.size(), 0.0);
    for (std::size_t k = 0; k < op.branch_currents.size(); ++k) {
        const double i = op.branch_currents[k];
        op.output_voltages[k] = (r_drain == 0.0) ? i * r_out : i * r_drain;
        std::visit(
            [&](const auto& dev) {
                using T = std::decay_t<decltype(dev)>;
                if constexpr (std::is_same_v<T, NpnParams>) {
                    op.base_currents[k] = npn_base_current(dev, i);
                } else {
                    const double limit = nmos_saturation_boundary(dev);
                    if (i > limit) {
                        std::ostringstream w;
                        w << "branch " << k << " current " << i << " A exceeds (W/L) I_t = " << limit
                          << " A; device is leaving weak inversion";
                        op.warnings.push_back(w.str());
                    }
                }
            },
            config.branch_devices[k]);
    }
    return op;
}

}  // namespace asmx
