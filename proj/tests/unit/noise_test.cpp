#include "asmx/errors.hpp"
#include "asmx/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace asmx;
using namespace asmx::noise;

constexpr double kB = 1.380649e-23;
constexpr double kQ = 1.602176634e-19;

double fraction_of(const NoiseBudget& b, const std::string& label) {
    for (const auto& t : b.terms) {
        if (t.label == label) return t.fraction;
    }
    ADD_FAILURE() << "no term " << label;
    return NAN;
}

double rms_of(const NoiseBudget& b, const std::string& label) {
    for (const auto& t : b.terms) {
        if (t.label == label) return t.rms;
    }
    ADD_FAILURE() << "no term " << label;
    return NAN;
}

TEST(Psd, ResistiveThermal) {
    EnvParams env;
    EXPECT_NEAR(thermal_psd_resistive(1e3, env), 4 * kB * 300 * 1e3, 1e-30);
    EXPECT_NEAR(thermal_psd_resistive(1e3, env), 1.657e-17, 0.001e-17);
    EXPECT_NEAR(std::sqrt(thermal_psd_resistive(1e3, env)), 4.07e-9, 0.01e-9);
    EXPECT_DOUBLE_EQ(thermal_psd_resistive(2e3, env), 2 * thermal_psd_resistive(1e3, env));
    env.temperature = 0.0;
    EXPECT_EQ(thermal_psd_resistive(1e3, env), 0.0);
    EXPECT_THROW(thermal_psd_resistive(0.0, EnvParams{}), DomainError);
}

TEST(Psd, Shot) {
    EXPECT_NEAR(shot_psd(100e-9), 2 * kQ * 100e-9, 1e-40);
    EXPECT_NEAR(shot_psd(100e-9), 3.204e-26, 0.001e-26);
    EXPECT_NEAR(shot_psd(1.0), 3.204e-19, 0.001e-19);
    EXPECT_DOUBLE_EQ(shot_psd(50e-9), 0.5 * shot_psd(100e-9));
    EXPECT_THROW(shot_psd(0.0), DomainError);
    EXPECT_THROW(shot_psd(-1e-9), DomainError);
}

TEST(Psd, Flicker) {
    EXPECT_NEAR(flicker_psd(1e-25, 200e-9, 1e3), 2e-35, 1e-48);
    EXPECT_DOUBLE_EQ(flicker_psd(1e-25, 200e-9, 2e3), 0.5 * flicker_psd(1e-25, 200e-9, 1e3));
    EXPECT_EQ(flicker_psd(1e-25, 0.0, 1e3), 0.0);
    EXPECT_THROW(flicker_psd(1e-25, 1e-7, 0.0), DomainError);
}

TEST(Psd, SaturationThermal) {
    EnvParams env;
    EXPECT_NEAR(thermal_psd_saturation(1e-3, env), 4 * kB * 300 * 1e-3 / 3, 1e-36);
    EXPECT_NEAR(thermal_psd_saturation(1e-3, env), 5.52e-24, 0.01e-24);
    EXPECT_DOUBLE_EQ(thermal_psd_saturation(3e-3, env), 3 * thermal_psd_saturation(1e-3, env));
    env.temperature = 0.0;
    EXPECT_EQ(thermal_psd_saturation(1e-3, env), 0.0);
    EXPECT_THROW(thermal_psd_saturation(0.0, EnvParams{}), DomainError);
}

TEST(Budget, ShotThermalSplit) {
    const auto b = branch_noise_budget(1e3, 1e-7, 1.0, 0.0, 1e3, EnvParams{});
    EXPECT_NEAR(100 * fraction_of(b, "shot"), 4.21, 0.03);
    EXPECT_NEAR(100 * fraction_of(b, "thermal"), 95.79, 0.03);
    // Closed form of the linear split.
    const double ratio = std::sqrt(1e3 * kQ * 1e-7 / (2 * kB * 300));
    EXPECT_NEAR(fraction_of(b, "shot"), ratio / (1 + ratio), 1e-12);
}

TEST(Budget, RmsTermsAtOneHertz) {
    const auto b = branch_noise_budget(1e3, 1e-7, 1.0, 0.0, 1e3, EnvParams{});
    EXPECT_NEAR(rms_of(b, "shot"), 1e3 * std::sqrt(2 * kQ * 1e-7), 1e-22);
    EXPECT_NEAR(rms_of(b, "shot"), 1.790e-10, 0.001e-10);
    EXPECT_NEAR(rms_of(b, "thermal"), 4.071e-9, 0.001e-9);
    EXPECT_NEAR(b.total_rms, rms_of(b, "shot") + rms_of(b, "thermal"), 1e-22);
    EXPECT_NEAR(b.total_rms_rss, std::hypot(rms_of(b, "shot"), rms_of(b, "thermal")), 1e-22);
}

TEST(Budget, BandwidthScaling) {
    const auto a = branch_noise_budget(1e3, 1e-7, 10.0, 1e-24, 1e3, EnvParams{});
    const auto b = branch_noise_budget(1e3, 1e-7, 40.0, 1e-24, 1e3, EnvParams{});
    ASSERT_EQ(a.terms.size(), 3u);
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        EXPECT_NEAR(b.terms[i].rms, 2 * a.terms[i].rms, 1e-12 * b.terms[i].rms);
        EXPECT_NEAR(b.terms[i].fraction, a.terms[i].fraction, 1e-12);
    }
}

TEST(Budget, FlickerTerm) {
    const auto b = branch_noise_budget(1e3, 1e-7, 4.0, 1e-20, 100.0, EnvParams{});
    EXPECT_NEAR(rms_of(b, "flicker"), 1e3 * std::sqrt(1e-20 * 1e-7 * 4.0 / 100.0), 1e-25);
}

TEST(BudgetProperty, FractionsSumToOneAndShotGrows) {
    double prev_r = 0.0;
    for (double r = 10.0; r <= 1e7; r *= 3.1) {
        const auto b = branch_noise_budget(r, 1e-7, 1e3, 1e-22, 1e2, EnvParams{});
        double s = 0.0;
        for (const auto& t : b.terms) s += t.fraction;
        EXPECT_NEAR(s, 1.0, 1e-9);
        const double f = fraction_of(branch_noise_budget(r, 1e-7, 1e3, 0.0, 1e2, EnvParams{}), "shot");
        EXPECT_GT(f, prev_r);
        prev_r = f;
    }
    double prev_i = 0.0;
    for (double i = 1e-12; i <= 1e-2; i *= 3.1) {
        const double f = fraction_of(branch_noise_budget(1e3, i, 1.0, 0.0, 1e2, EnvParams{}), "shot");
        EXPECT_GT(f, prev_i);
        prev_i = f;
    }
}

TEST(Compare, IdenticalLoadsGiveZeroDelta) {
    const auto s = branch_sources(1e3, 1e-7, 1.0, 0.0, 1e3);
    EXPECT_DOUBLE_EQ(compare_load_budgets(s, s, EnvParams{}).snr_delta_db, 0.0);
}

TEST(Compare, ThermalDominatedVersusShotOnly) {
    const auto linear = branch_sources(1e3, 1e-7, 1.0, 0.0, 1e3);
    std::vector<NoiseSourceSpec> shot_only;
    for (const auto& s : linear) {
        if (s.kind == SourceKind::shot) shot_only.push_back(s);
    }
    ASSERT_EQ(shot_only.size(), 1u);
    const auto cmp = compare_load_budgets(linear, shot_only, EnvParams{});
    EXPECT_NEAR(cmp.snr_delta_db, 20 * std::log10((4.071 + 0.179) / 0.179), 0.02);
    EXPECT_NEAR(cmp.snr_delta_db, 27.5, 0.05);
}

TEST(Sources, SaturationThermalReferredThroughResistance) {
    NoiseSourceSpec s;
    s.kind = SourceKind::thermal_saturation;
    s.label = "channel";
    s.transconductance = 1e-6;
    s.resistance = 1e5;
    s.bandwidth = 100.0;
    const auto b = budget_from_sources(std::vector<NoiseSourceSpec>{s}, EnvParams{});
    EXPECT_NEAR(b.terms[0].psd, 1e10 * 4 * kB * 300 * 1e-6 / 3, 1e-25);
    EXPECT_NEAR(b.terms[0].rms, std::sqrt(b.terms[0].psd * 100.0), 1e-18);
    EXPECT_DOUBLE_EQ(b.terms[0].fraction, 1.0);
}

TEST(Sources, RejectsNonPositiveBandwidth) {
    auto s = branch_sources(1e3, 1e-7, 1.0, 0.0, 1e3);
    s[0].bandwidth = 0.0;
    EXPECT_THROW(budget_from_sources(s, EnvParams{}), DomainError);
}

}  // namespace
