#pragma once

// =============================================================================
// N-branch differential softmax network
// =============================================================================
// N transistors share one emitter/source node fed by a tail current source.
// Each branch drives its own load (resistor or triode PMOS) or copies its
// current through a mirror into a shared R-C output branch. The DC operating
// point is found by a root-find on the shared node voltage:
//
//     sum_k I_k(v) - I_tail(v) = 0
//
// where every I_k already satisfies its own load line (the drain voltage
// depends on I_k through the load drop, so each branch is a small fixed point).
// =============================================================================

#include "asmx/devices.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace asmx {

enum class Technology { bipolar, nmos };

using DeviceParams = std::variant<NpnParams, NmosParams>;

struct ResistorLoad {
    double resistance = 0.0;  // ohm
};

struct PmosLinearLoad {
    PmosLinearParams params;
};

/// Cascode PMOS mirror copying the selected branch current, scaled by
/// width_ratio, into a load resistor referred to the low rail.
struct MirroredLoad {
    double load_resistance = 0.0;  // ohm
    double width_ratio = 1.0;
};

using LoadSpec = std::variant<ResistorLoad, PmosLinearLoad, MirroredLoad>;

struct NetworkConfig {
    int class_size = 0;
    Technology technology = Technology::bipolar;
    std::vector<DeviceParams> branch_devices;
    LoadSpec load = ResistorLoad{};
    TailSourceSpec tail;
    double v_supply_high = 0.0;
    double v_supply_low = 0.0;
    EnvParams env;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Resistance between the high rail and each branch drain/collector;
    /// zero for a mirrored load.
    [[nodiscard]] double drain_resistance() const;

    /// Output volts per ampere of branch current (R, R_eq, or width_ratio * R_load).
    [[nodiscard]] double output_transresistance() const;

    /// Softmax temperature of the ideal network: V_T (bipolar) or n V_T (nmos,
    /// taken from the first device).
    [[nodiscard]] double softmax_scale() const;
};

/// Same device record replicated on every branch.
NetworkConfig make_network(Technology technology, int class_size, const DeviceParams& device,
                           LoadSpec load, TailSourceSpec tail, double v_supply_high,
                           double v_supply_low, EnvParams env = {});

/// Multiplies the current prefactor (I_S or W/L) by `factor`.
void scale_prefactor(DeviceParams& device, double factor);

const char* to_string(Technology technology);

struct OperatingPoint {
    double shared_node_voltage = 0.0;
    std::vector<double> branch_currents;
    std::vector<double> output_voltages;
    std::vector<double> base_currents;  // bipolar only, I_C / beta
    double tail_current = 0.0;
    double kcl_residual = 0.0;
    int iterations = 0;
    std::vector<std::string> warnings;
};

struct SolverOptions {
    double tolerance = 0.0;  // amperes; <= 0 selects 1e-6 * nominal tail current
    int max_iterations = 200;
    int inner_max_iterations = 200;
    double inner_relative_tolerance = 1e-12;
};

/// Ideal closed-form branch fractions: softmax(inputs, V_T) or softmax(inputs, n V_T).
std::vector<double> closed_form_fractions(const NetworkConfig& config, std::span<const double> inputs);

OperatingPoint solve_operating_point(const NetworkConfig& config, std::span<const double> inputs,
                                     const SolverOptions& options = {});

/// sum_k I_k(v_shared) - I_tail(v_shared), with each branch on its load line.
double kcl_residual(const NetworkConfig& config, std::span<const double> inputs, double v_shared,
                    const SolverOptions& options = {});

/// Current through branch `k` for a given shared-node voltage, after the
/// branch's load-line fixed point.
double branch_current(const NetworkConfig& config, std::size_t k, double input, double v_shared,
                      const SolverOptions& options = {});

/// Outer root-find bracket [min(inputs) - 1 V, max(inputs)].
std::pair<double, double> shared_node_bracket(std::span<const double> inputs);

}  // namespace asmx
