#include "asmx/devices.hpp"
#include "asmx/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace asmx;

TEST(Env, ThermalVoltageFromConstants) {
    EnvParams env;
    EXPECT_NEAR(env.thermal_voltage(), 1.380649e-23 * 300.0 / 1.602176634e-19, 1e-15);
    EXPECT_NEAR(env.thermal_voltage(), 0.025852, 1e-6);
    env.temperature = 0.0;
    EXPECT_THROW(env.validate(), DomainError);
}

TEST(Npn, ZeroBiasGivesSaturationCurrent) {
    NpnParams p;
    EnvParams env;
    for (double vce : {0.0, 1.0, 3.0}) EXPECT_DOUBLE_EQ(npn_collector_current(p, env, 0.0, vce), p.saturation_current);
}

TEST(Npn, DoublesAfterThermalVoltageTimesLnTwo) {
    NpnParams p;
    EnvParams env;
    EXPECT_NEAR(npn_collector_current(p, env, env.thermal_voltage() * std::log(2.0), 1.0), 2.0 * p.saturation_current,
                1e-28);
}

TEST(Npn, ForwardActiveValue) {
    NpnParams p;
    p.saturation_current = 1e-14;
    EnvParams env;
    const double expected = 1e-14 * std::exp(0.65 / (1.380649e-23 * 300.0 / 1.602176634e-19));
    EXPECT_NEAR(npn_collector_current(p, env, 0.65, 2.0), expected, 1e-12 * expected);
    EXPECT_NEAR(expected, 8.30e-4, 0.01e-4);
}

TEST(Npn, EarlyFactorAndBaseCurrent) {
    NpnParams p;
    p.early_voltage = 50.0;
    p.beta = 100.0;
    EnvParams env;
    const double i0 = npn_collector_current(p, env, 0.6, 0.0);
    EXPECT_NEAR(npn_collector_current(p, env, 0.6, 5.0), i0 * 1.1, 1e-12 * i0);
    EXPECT_DOUBLE_EQ(npn_base_current(p, 1e-3), 1e-5);
    p.beta = kInfinity;
    EXPECT_DOUBLE_EQ(npn_base_current(p, 1e-3), 0.0);
}

TEST(Npn, InvalidParameters) {
    NpnParams p;
    p.saturation_current = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.early_voltage = -1.0;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.beta = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(Nmos, ThresholdGateGivesThresholdCurrent) {
    NmosParams p;
    p.wl_ratio = 3.0;
    EnvParams env;
    const double i = nmos_subthreshold_current(p, env, p.threshold_voltage, 0.2);
    EXPECT_NEAR(i, 3.0 * p.threshold_current, 1e-3 * 3.0 * p.threshold_current);
}

TEST(Nmos, ZeroDrainVoltageGivesZero) {
    NmosParams p;
    EnvParams env;
    EXPECT_EQ(nmos_subthreshold_current(p, env, 0.3, 0.0), 0.0);
}

TEST(Nmos, SubthresholdValue) {
    NmosParams p;
    p.wl_ratio = 1.0;
    p.threshold_current = 1e-7;
    p.threshold_voltage = 0.4;
    p.subthreshold_swing = 1.71;
    EnvParams env;
    const double vt = 1.380649e-23 * 300.0 / 1.602176634e-19;
    const double expected = 1e-7 * std::exp(-0.1 / (1.71 * vt)) * (1.0 - std::exp(-0.5 / vt));
    EXPECT_NEAR(nmos_subthreshold_current(p, env, 0.3, 0.5), expected, 1e-12 * expected);
    EXPECT_NEAR(expected, 1.041e-8, 0.001e-8);
}

TEST(Nmos, LeakageFactorAtThreeThermalVoltages) {
    NmosParams p;
    EnvParams env;
    const double full = nmos_subthreshold_current(p, env, 0.3, 1.0);
    const double at3 = nmos_subthreshold_current(p, env, 0.3, 3.0 * env.thermal_voltage());
    EXPECT_NEAR(at3 / full, 1.0 - std::exp(-3.0), 1e-12);
    EXPECT_NEAR(at3 / full, 0.9502, 1e-4);
}

TEST(Nmos, ClmFactor) {
    NmosParams p;
    p.clm_coefficient = 0.1;
    EnvParams env;
    NmosParams ideal = p;
    ideal.clm_coefficient = 0.0;
    EXPECT_NEAR(nmos_subthreshold_current(p, env, 0.3, 1.0), 1.1 * nmos_subthreshold_current(ideal, env, 0.3, 1.0),
                1e-22);
}

TEST(Nmos, ExponentialSlopeByRegression) {
    NmosParams p;
    p.subthreshold_swing = 1.71;
    EnvParams env;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = 11;
    for (int i = 0; i < n; ++i) {
        const double vgs = 0.2 + 0.01 * i;
        const double y = std::log(nmos_subthreshold_current(p, env, vgs, 0.5));
        sx += vgs;
        sy += y;
        sxx += vgs * vgs;
        sxy += vgs * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = 1.0 / (1.71 * env.thermal_voltage());
    EXPECT_NEAR(slope, expected, 1e-3 * expected);
}

TEST(Nmos, DerivativesMatchFiniteDifferences) {
    NmosParams p;
    p.clm_coefficient = 0.05;
    EnvParams env;
    const double vgs = 0.31, vds = 0.04, h = 1e-7;
    const auto s = nmos_subthreshold_sample(p, env, vgs, vds);
    const double dg = (nmos_subthreshold_current(p, env, vgs + h, vds) - nmos_subthreshold_current(p, env, vgs - h, vds)) /
                      (2 * h);
    const double dd = (nmos_subthreshold_current(p, env, vgs, vds + h) - nmos_subthreshold_current(p, env, vgs, vds - h)) /
                      (2 * h);
    EXPECT_NEAR(s.d_control, dg, 1e-6 * std::abs(dg));
    EXPECT_NEAR(s.d_output, dd, 1e-6 * std::abs(dd));
}

TEST(Npn, DerivativesMatchFiniteDifferences) {
    NpnParams p;
    p.early_voltage = 40.0;
    EnvParams env;
    const double vbe = 0.62, vce = 2.0, h = 1e-7;
    const auto s = npn_collector_sample(p, env, vbe, vce);
    const double dg = (npn_collector_current(p, env, vbe + h, vce) - npn_collector_current(p, env, vbe - h, vce)) / (2 * h);
    const double dd = (npn_collector_current(p, env, vbe, vce + h) - npn_collector_current(p, env, vbe, vce - h)) / (2 * h);
    EXPECT_NEAR(s.d_control, dg, 1e-6 * dg);
    EXPECT_NEAR(s.d_output, dd, 1e-6 * dd);
}

TEST(DeviceProperty, StrictMonotonicity) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> v(0.0, 0.8);
    NpnParams npn;
    npn.early_voltage = 30.0;
    NmosParams nmos;
    nmos.clm_coefficient = 0.02;
    EnvParams env;
    for (int i = 0; i < 1000; ++i) {
        const double a = v(rng);
        const double b = a + 1e-3;
        const double vo = v(rng) + 0.01;
        EXPECT_LT(npn_collector_current(npn, env, a, vo), npn_collector_current(npn, env, b, vo));
        EXPECT_LT(nmos_subthreshold_current(nmos, env, a, vo), nmos_subthreshold_current(nmos, env, b, vo));
        EXPECT_LE(nmos_subthreshold_current(nmos, env, a, vo), nmos_subthreshold_current(nmos, env, a, vo + 1e-3));
    }
}

TEST(Nmos, InvalidParameters) {
    NmosParams p;
    p.subthreshold_swing = 0.9;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.clm_coefficient = -0.1;
    EXPECT_THROW(p.validate(), DomainError);
    p = {};
    p.wl_ratio = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(PmosLoad, Resistance) {
    PmosLinearParams p;
    p.wl_ratio = 10.0;
    p.process_gain = 1e-4;
    p.threshold_voltage_mag = 0.45;
    EXPECT_NEAR(pmos_linear_resistance(p, 1.8, 0.0), 1.0 / (10.0 * 1e-4 * 1.35), 1e-9);
    EXPECT_NEAR(pmos_linear_resistance(p, 1.8, 0.0), 740.7, 0.05);
    const double r = pmos_linear_resistance(p, 1.8, 0.0);
    p.wl_ratio = 20.0;
    EXPECT_NEAR(pmos_linear_resistance(p, 1.8, 0.0), r / 2.0, 1e-9);
}

TEST(PmosLoad, RejectsMissingOverdrive) {
    PmosLinearParams p;
    p.threshold_voltage_mag = 0.45;
    try {
        pmos_linear_resistance(p, 0.45, 0.0);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("not in strong inversion"), std::string::npos);
    }
}

TEST(Tail, IdealAndCascodeAreConstant) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> v(-5.0, 5.0);
    for (TailKind kind : {TailKind::ideal, TailKind::cascode}) {
        TailSourceSpec spec{kind, 200e-9};
        for (int i = 0; i < 1000; ++i) EXPECT_EQ(tail_current(spec, v(rng)), 200e-9);
        EXPECT_EQ(tail_current_slope(spec), 0.0);
    }
}

TEST(Tail, FiniteImpedanceLinearModel) {
    TailSourceSpec spec{TailKind::finite_impedance, 200e-9, 1e6, 0.3};
    EXPECT_NEAR(tail_current(spec, 0.41), 310e-9, 1e-18);
    EXPECT_EQ(tail_current(spec, 0.3), 200e-9);
    EXPECT_DOUBLE_EQ(tail_current_slope(spec), 1e-6);
}

TEST(Tail, InvalidSpec) {
    TailSourceSpec spec{TailKind::ideal, 0.0};
    EXPECT_THROW(spec.validate(), DomainError);
    spec = {TailKind::finite_impedance, 1e-7, -1.0, 0.0};
    EXPECT_THROW(spec.validate(), DomainError);
}

}  // namespace
