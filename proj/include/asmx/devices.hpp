#pragma once

// =============================================================================
// Compact device models
// =============================================================================
// Current-voltage models for every device class in the differential softmax
// network: forward-active NPN, weak-inversion NMOS, the triode-biased PMOS load
// and the tail current source. All functions are total and side-effect free.
// =============================================================================

#include <limits>

namespace asmx {

inline constexpr double kBoltzmann = 1.380649e-23;         // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct EnvParams {
    double temperature = 300.0;  // K

    /// k_B T / q
    [[nodiscard]] double thermal_voltage() const { return kBoltzmann * temperature / kElementaryCharge; }
    void validate() const;
};

struct NpnParams {
    double saturation_current = 1e-14;  // A
    double early_voltage = kInfinity;   // V
    double beta = kInfinity;

    void validate() const;
};

struct NmosParams {
    double wl_ratio = 1.0;
    double threshold_current = 1e-7;   // A, drain current at V_gs = V_TH per unit W/L
    double threshold_voltage = 0.4;    // V
    double subthreshold_swing = 1.5;   // n
    double clm_coefficient = 0.0;      // 1/V

    void validate() const;
};

struct PmosLinearParams {
    double wl_ratio = 1.0;
    double process_gain = 1e-4;          // A/V^2 (mu_p C_ox)
    double threshold_voltage_mag = 0.45; // V

    void validate() const;
};

enum class TailKind { ideal, finite_impedance, cascode };

struct TailSourceSpec {
    TailKind kind = TailKind::ideal;
    double nominal_current = 0.0;         // A
    double output_resistance = kInfinity; // ohm, finite_impedance only
    double reference_node_voltage = 0.0;  // V, finite_impedance only

    void validate() const;
};

/// Value of a device current together with its partial derivatives with
/// respect to the controlling voltage (v_be / v_gs) and the output voltage
/// (v_ce / v_ds). Used by the network solver's Newton steps.
struct CurrentSample {
    double current = 0.0;
    double d_control = 0.0;
    double d_output = 0.0;
};

/// I_S exp(v_be/V_T) (1 + v_ce/V_A); the Early factor is dropped for V_A = inf.
double npn_collector_current(const NpnParams& p, const EnvParams& env, double v_be, double v_ce);
CurrentSample npn_collector_sample(const NpnParams& p, const EnvParams& env, double v_be, double v_ce);

/// I_C / beta, zero when beta is infinite. Reported only; not fed back into KCL.
double npn_base_current(const NpnParams& p, double collector_current);

/// (W/L) I_t exp((v_gs - V_TH)/(n V_T)) (1 - exp(-v_ds/V_T)) (1 + lambda v_ds)
double nmos_subthreshold_current(const NmosParams& p, const EnvParams& env, double v_gs, double v_ds);
CurrentSample nmos_subthreshold_sample(const NmosParams& p, const EnvParams& env, double v_gs, double v_ds);

/// Drain current above which the device leaves weak inversion, (W/L) I_t.
double nmos_saturation_boundary(const NmosParams& p);

/// Channel resistance of a triode PMOS with its gate tied to the low rail.
/// Throws DomainError when v_dd - v_ss does not exceed |V_TH,P|.
double pmos_linear_resistance(const PmosLinearParams& p, double v_dd, double v_ss);

/// Ideal and cascode sources are constant; the finite-impedance mirror adds
/// (v_node - v_ref)/r_out to the nominal current.
double tail_current(const TailSourceSpec& spec, double v_node);
double tail_current_slope(const TailSourceSpec& spec);

const char* to_string(TailKind kind);

}  // namespace asmx
