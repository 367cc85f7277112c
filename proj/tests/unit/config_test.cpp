#include "asmx/config.hpp"
#include "asmx/errors.hpp"
#include "asmx/units.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace {

using namespace asmx;
using namespace asmx::config;
using units::Unit;
using units::parse_quantity;

const char* kMinimal = R"(# minimal network
[network]
technology = "nmos"
class_size = 3
v_supply_high = "1.8V"

[device]
wl_ratio = 2
threshold_current = "50nA"
threshold_voltage = "0.4V"
subthreshold_swing = 1.5

[load]
kind = "resistor"
resistance = "10kOhm"

[tail]
current = "100nA"
)";

std::size_t error_line(const std::string& text) {
    try {
        load_config_text(text, "test.toml");
    } catch (const ConfigError& e) {
        return e.line();
    }
    ADD_FAILURE() << "expected ConfigError";
    return 0;
}

std::string error_text(const std::string& text) {
    try {
        load_config_text(text, "test.toml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "expected ConfigError";
    return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return text.replace(pos, from.size(), to);
}

TEST(Units, PrefixesAndSpellings) {
    EXPECT_DOUBLE_EQ(parse_quantity("200nA", Unit::ampere), 200e-9);
    EXPECT_DOUBLE_EQ(parse_quantity("3.5MOhm", Unit::ohm), 3.5e6);
    EXPECT_DOUBLE_EQ(parse_quantity("3.5 Mohm", Unit::ohm), 3.5e6);
    EXPECT_DOUBLE_EQ(parse_quantity("20Ω", Unit::ohm), 20.0);
    EXPECT_DOUBLE_EQ(parse_quantity("50fF", Unit::farad), 50e-15);
    EXPECT_DOUBLE_EQ(parse_quantity("600mV", Unit::volt), 0.6);
    EXPECT_DOUBLE_EQ(parse_quantity("-0.3V", Unit::volt), -0.3);
    EXPECT_DOUBLE_EQ(parse_quantity("250kHz", Unit::hertz), 250e3);
    EXPECT_DOUBLE_EQ(parse_quantity("1.08uW", Unit::watt), 1.08e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("1.08µW", Unit::watt), 1.08e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("100uA/V2", Unit::amp_per_volt2), 100e-6);
    EXPECT_DOUBLE_EQ(parse_quantity("0.05/V", Unit::per_volt), 0.05);
    EXPECT_DOUBLE_EQ(parse_quantity("1e-14A", Unit::ampere), 1e-14);
    EXPECT_TRUE(std::isinf(parse_quantity("infV", Unit::volt)));
}

TEST(Units, SuffixIsMandatory) {
    EXPECT_THROW(parse_quantity("200", Unit::ampere), DomainError);
    EXPECT_THROW(parse_quantity("200nV", Unit::ampere), DomainError);
    EXPECT_THROW(parse_quantity("200xA", Unit::ampere), DomainError);
    EXPECT_THROW(parse_quantity("nA", Unit::ampere), DomainError);
    EXPECT_THROW(parse_quantity("nanA", Unit::ampere), DomainError);
}

TEST(Config, MinimalFileWithDefaults) {
    const auto rc = load_config_text(kMinimal, "min.toml");
    EXPECT_EQ(rc.network.class_size, 3);
    EXPECT_EQ(rc.network.technology, Technology::nmos);
    EXPECT_DOUBLE_EQ(rc.network.v_supply_low, 0.0);
    EXPECT_DOUBLE_EQ(rc.network.env.temperature, 300.0);
    EXPECT_EQ(rc.network.tail.kind, TailKind::ideal);
    EXPECT_DOUBLE_EQ(rc.dc_bias, 0.9);
    EXPECT_EQ(rc.inputs, std::vector<double>(3, 0.9));
    EXPECT_FALSE(rc.sweep.has_value());
    EXPECT_DOUBLE_EQ(std::get<ResistorLoad>(rc.network.load).resistance, 1e4);
}

TEST(Config, BipolarPreset) {
    const auto rc = load_preset("bipolar_paper");
    EXPECT_EQ(rc.network.class_size, 4);
    EXPECT_EQ(rc.network.technology, Technology::bipolar);
    EXPECT_DOUBLE_EQ(std::get<ResistorLoad>(rc.network.load).resistance, 20.0);
    EXPECT_DOUBLE_EQ(rc.network.tail.nominal_current, 50e-3);
    EXPECT_DOUBLE_EQ(rc.network.v_supply_high, 5.0);
    EXPECT_DOUBLE_EQ(rc.network.v_supply_low, 0.0);
    EXPECT_DOUBLE_EQ(rc.dc_bias, 2.5);
    ASSERT_TRUE(rc.sweep.has_value());
}

TEST(Config, NmosPreset) {
    const auto rc = load_preset("nmos_paper");
    EXPECT_EQ(rc.network.class_size, 4);
    const auto& load = std::get<MirroredLoad>(rc.network.load);
    EXPECT_DOUBLE_EQ(load.load_resistance, 3.5e6);
    EXPECT_DOUBLE_EQ(load.width_ratio, 1.0);
    ASSERT_TRUE(rc.transient.has_value());
    EXPECT_DOUBLE_EQ(rc.transient->load_capacitance, 50e-15);
    EXPECT_DOUBLE_EQ(rc.network.v_supply_high, 1.8);
    EXPECT_DOUBLE_EQ(std::get<NmosParams>(rc.network.branch_devices[0]).subthreshold_swing, 1.71);
    EXPECT_GE(rc.network.tail.nominal_current, 180e-9);
    EXPECT_LE(rc.network.tail.nominal_current, 300e-9);
    EXPECT_DOUBLE_EQ(rc.network.tail.nominal_current, 200e-9);
    EXPECT_DOUBLE_EQ(rc.dc_bias, 0.6);
    ASSERT_TRUE(rc.reference_power.has_value());
    EXPECT_DOUBLE_EQ(*rc.reference_power, 1.08e-6);
    ASSERT_TRUE(rc.noise && rc.noise->compare_load);
    EXPECT_TRUE(std::holds_alternative<PmosLinearLoad>(*rc.noise->compare_load));
}

TEST(Config, PresetsShipAsRepositoryFiles) {
    for (const auto& name : preset_names()) {
        std::ifstream in(std::string(ASMX_SOURCE_DIR) + "/presets/" + name + ".toml", std::ios::binary);
        ASSERT_TRUE(in) << name;
        std::ostringstream buf;
        buf << in.rdbuf();
        EXPECT_EQ(buf.str(), std::string(preset_text(name)));
        const auto from_file = load_config(std::string(ASMX_SOURCE_DIR) + "/presets/" + name + ".toml");
        EXPECT_EQ(from_file.network.class_size, 4);
    }
    EXPECT_THROW(preset_text("nope"), ConfigError);
}

TEST(Config, ClassSizeOneNamesFieldAndLine) {
    const std::string text = replace(kMinimal, "class_size = 3", "class_size = 1");
    const std::string msg = error_text(text);
    EXPECT_NE(msg.find("class_size"), std::string::npos) << msg;
    EXPECT_EQ(error_line(text), 4u);
}

TEST(Config, ParseErrorsAreLineReferenced) {
    EXPECT_EQ(error_line(replace(kMinimal, "class_size = 3", "class_size 3")), 4u);
    EXPECT_EQ(error_line(replace(kMinimal, "[load]", "[load")), 13u);
    EXPECT_EQ(error_line(replace(kMinimal, "kind = \"resistor\"", "kind = \"resistor")), 14u);
    EXPECT_EQ(error_line(replace(kMinimal, "wl_ratio = 2", "wl_ratio = two")), 8u);
}

TEST(Config, UnknownKeyAndSection) {
    const std::string extra_key = replace(kMinimal, "wl_ratio = 2", "wl_ratio = 2\nwidth = 3");
    EXPECT_EQ(error_line(extra_key), 9u);
    EXPECT_NE(error_text(extra_key).find("unknown key"), std::string::npos);

    const std::string extra_section = std::string(kMinimal) + "\n[bogus]\nx = 1\n";
    EXPECT_NE(error_text(extra_section).find("unknown section"), std::string::npos);
    EXPECT_EQ(error_line(extra_section), 20u);
}

TEST(Config, DuplicatesRejected) {
    EXPECT_NE(error_text(replace(kMinimal, "wl_ratio = 2", "wl_ratio = 2\nwl_ratio = 3")).find("duplicate key"),
              std::string::npos);
    EXPECT_NE(error_text(std::string(kMinimal) + "[tail]\n").find("duplicate section"), std::string::npos);
}

TEST(Config, PhysicalKeysNeedUnitStrings) {
    const std::string bare = replace(kMinimal, "current = \"100nA\"", "current = 1e-7");
    EXPECT_EQ(error_line(bare), 18u);
    EXPECT_NE(error_text(bare).find("unit"), std::string::npos);
    EXPECT_EQ(error_line(replace(kMinimal, "\"10kOhm\"", "\"10kV\"")), 15u);
}

TEST(Config, InvariantViolations) {
    EXPECT_NE(error_text(replace(kMinimal, "\"1.8V\"", "\"-1V\"")).find("v_supply_high"), std::string::npos);
    EXPECT_NE(error_text(replace(kMinimal, "subthreshold_swing = 1.5", "subthreshold_swing = 0.5"))
                  .find("subthreshold_swing"),
              std::string::npos);
    EXPECT_NE(error_text(replace(kMinimal, "technology = \"nmos\"", "technology = \"gaas\"")).find("technology"),
              std::string::npos);
    EXPECT_NE(error_text(replace(kMinimal, "\"100nA\"", "\"-100nA\"")).find("current"), std::string::npos);
    EXPECT_NE(error_text(std::string(kMinimal) + "[inputs]\nvalues = [\"1V\", \"1V\"]\n").find("values"),
              std::string::npos);
}

TEST(Config, MissingRequiredSection) {
    const std::string text = replace(kMinimal, "[tail]\ncurrent = \"100nA\"\n", "");
    EXPECT_NE(error_text(text).find("[tail]"), std::string::npos);
}

TEST(Config, SectionsAndArrays) {
    const std::string text = std::string(kMinimal) + R"(
[inputs]
dc_bias = "0.6V"
values = ["0.5V", "0.6V", "700mV"]  # explicit vector

[device_extra_comment]
)";
    EXPECT_NE(error_text(text).find("unknown section"), std::string::npos);

    const std::string ok = std::string(kMinimal) + R"(
[inputs]
dc_bias = "0.6V"
values = ["0.5V", "0.6V", "700mV"]  # explicit vector

[montecarlo]
sigma = 0.02
trials = 10
sigmas = [0.001, 0.01]

[transient]
load_capacitance = "50fF"
high = "0.9V"
frequency = "250kHz"
noise = true
)";
    const auto rc = load_config_text(ok, "ok.toml");
    ASSERT_EQ(rc.inputs.size(), 3U);
    EXPECT_DOUBLE_EQ(rc.inputs[0], 0.5);
    EXPECT_DOUBLE_EQ(rc.inputs[1], 0.6);
    EXPECT_DOUBLE_EQ(rc.inputs[2], 0.7);
    ASSERT_TRUE(rc.montecarlo.has_value());
    EXPECT_EQ(rc.montecarlo->trials, 10);
    EXPECT_EQ(rc.montecarlo->sigmas, (std::vector<double>{0.001, 0.01}));
    ASSERT_TRUE(rc.transient.has_value());
    EXPECT_TRUE(rc.transient->noise);
    EXPECT_DOUBLE_EQ(rc.transient->low, 0.6);
}

TEST(Config, PrefactorScalePerBranch) {
    const std::string text = replace(kMinimal, "subthreshold_swing = 1.5",
                                     "subthreshold_swing = 1.5\nprefactor_scale = [1.0, 1.01, 0.99]");
    const auto rc = load_config_text(text, "t");
    EXPECT_DOUBLE_EQ(std::get<NmosParams>(rc.network.branch_devices[1]).wl_ratio, 2.02);
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load_config("/nonexistent/file.toml"), ConfigError);
}

}  // namespace
