#include "asmx/devices.hpp"

#include "asmx/errors.hpp"

#include <cmath>
#include <string>

namespace asmx {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw DomainError(message);
    }
}

bool positive_or_inf(double v) { return v > 0.0 && !std::isnan(v); }

}  // namespace

void EnvParams::validate() const {
    require(temperature > 0.0 && std::isfinite(temperature), "temperature must be positive");
}

void NpnParams::validate() const {
    require(saturation_current > 0.0 && std::isfinite(saturation_current),
            "npn saturation_current must be positive");
    require(positive_or_inf(early_voltage), "npn early_voltage must be positive or infinite");
    require(positive_or_inf(beta), "npn beta must be positive or infinite");
}

void NmosParams::validate() const {
    require(wl_ratio > 0.0 && std::isfinite(wl_ratio), "nmos wl_ratio must be positive");
    require(threshold_current > 0.0 && std::isfinite(threshold_current),
            "nmos threshold_current must be positive");
    require(std::isfinite(threshold_voltage), "nmos threshold_voltage must be finite");
    require(subthreshold_swing >= 1.0 && std::isfinite(subthreshold_swing),
            "nmos subthreshold_swing must be >= 1");
    require(clm_coefficient >= 0.0 && std::isfinite(clm_coefficient),
            "nmos clm_coefficient must be >= 0");
}

void PmosLinearParams::validate() const {
    require(wl_ratio > 0.0 && std::isfinite(wl_ratio), "pmos wl_ratio must be positive");
    require(process_gain > 0.0 && std::isfinite(process_gain), "pmos process_gain must be positive");
    require(threshold_voltage_mag > 0.0 && std::isfinite(threshold_voltage_mag),
            "pmos threshold_voltage_mag must be positive");
}

void TailSourceSpec::validate() const {
    require(nominal_current > 0.0 && std::isfinite(nominal_current),
            "tail nominal_current must be positive");
    if (kind == TailKind::finite_impedance) {
        require(output_resistance > 0.0 && std::isfinite(output_resistance),
                "finite_impedance tail needs a positive finite output_resistance");
        require(std::isfinite(reference_node_voltage), "tail reference_node_voltage must be finite");
    }
}

CurrentSample npn_collector_sample(const NpnParams& p, const EnvParams& env, double v_be, double v_ce) {
    const double vt = env.thermal_voltage();
    const double core = p.saturation_current * std::exp(v_be / vt);
    CurrentSample s;
    if (std::isinf(p.early_voltage)) {
        s.current = core;
        s.d_output = 0.0;
    } else {
        s.current = core * (1.0 + v_ce / p.early_voltage);
        s.d_output = core / p.early_voltage;
    }
    s.d_control = s.current / vt;
    return s;
}

double npn_collector_current(const NpnParams& p, const EnvParams& env, double v_be, double v_ce) {
    return npn_collector_sample(p, env, v_be, v_ce).current;
}

double npn_base_current(const NpnParams& p, double collector_current) {
    return std::isinf(p.beta) ? 0.0 : collector_current / p.beta;
}

CurrentSample nmos_subthreshold_sample(const NmosParams& p, const EnvParams& env, double v_gs, double v_ds) {
    const double vt = env.thermal_voltage();
    const double nvt = p.subthreshold_swing * vt;
    const double core = p.wl_ratio * p.threshold_current * std::exp((v_gs - p.threshold_voltage) / nvt);
    const double drain_exp = std::exp(-v_ds / vt);
    const double leakage = 1.0 - drain_exp;  // exactly 0 at v_ds = 0
    const double clm = 1.0 + p.clm_coefficient * v_ds;

    CurrentSample s;
    s.current = core * leakage * clm;
    s.d_control = s.current / nvt;
    s.d_output = core * (drain_exp / vt * clm + leakage * p.clm_coefficient);
    return s;
}

double nmos_subthreshold_current(const NmosParams& p, const EnvParams& env, double v_gs, double v_ds) {
    return nmos_subthreshold_sample(p, env, v_gs, v_ds).current;
}

double nmos_saturation_boundary(const NmosParams& p) { return p.wl_ratio * p.threshold_current; }

double pmos_linear_resistance(const PmosLinearParams& p, double v_dd, double v_ss) {
    const double overdrive = v_dd - v_ss - p.threshold_voltage_mag;
    if (!(overdrive > 0.0)) {
        throw DomainError("pmos_linear_resistance: load not in strong inversion (v_dd - v_ss <= |V_TH,P|)");
    }
    return 1.0 / (p.wl_ratio * p.process_gain * overdrive);
}

double tail_current(const TailSourceSpec& spec, double v_node) {
    switch (spec.kind) {
        case TailKind::ideal:
        case TailKind::cascode:
            return spec.nominal_current;
        case TailKind::finite_impedance:
            return spec.nominal_current + (v_node - spec.reference_node_voltage) / spec.output_resistance;
    }
    return spec.nominal_current;
}

double tail_current_slope(const TailSourceSpec& spec) {
    return spec.kind == TailKind::finite_impedance ? 1.0 / spec.output_resistance : 0.0;
}

const char* to_string(TailKind kind) {
    switch (kind) {
        case TailKind::ideal: return "ideal";
        case TailKind::finite_impedance: return "finite_impedance";
        case TailKind::cascode: return "cascode";
    }
    return "?";
}

}  // namespace asmx
