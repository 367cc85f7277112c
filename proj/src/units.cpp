#include "asmx/units.hpp"

#include "asmx/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

namespace asmx::units {

namespace {

std::array<std::string_view, 3> spellings(Unit unit) {
    switch (unit) {
        case Unit::volt: return {"V", "", ""};
        case Unit::ampere: return {"A", "", ""};
        case Unit::ohm: return {"Ohm", "ohm", "Ω"};
        case Unit::farad: return {"F", "", ""};
        case Unit::hertz: return {"Hz", "", ""};
        case Unit::second: return {"s", "", ""};
        case Unit::kelvin: return {"K", "", ""};
        case Unit::watt: return {"W", "", ""};
        case Unit::per_volt: return {"/V", "", ""};
        case Unit::amp_per_volt2: return {"A/V2", "A/V^2", ""};
    }
    return {"", "", ""};
}

bool prefix_factor(std::string_view prefix, double& factor) {
    static constexpr std::pair<std::string_view, double> table[] = {
        {"", 1.0},   {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"µ", 1e-6},
        {"m", 1e-3}, {"k", 1e3},   {"M", 1e6},   {"G", 1e9},  {"T", 1e12},
    };
    for (const auto& [p, f] : table) {
        if (prefix == p) {
            factor = f;
            return true;
        }
    }
    return false;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

const char* symbol(Unit unit) { return spellings(unit)[0].data(); }

double parse_quantity(std::string_view text, Unit unit) {
    const std::string_view s = trim(text);
    double number = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && s.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, number);
    if (ec != std::errc{} || ptr == begin) {
        throw DomainError("'" + std::string(text) + "' does not start with a number");
    }
    if (std::isnan(number)) {
        throw DomainError("'" + std::string(text) + "' is not a number");
    }
    const std::string_view suffix = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    for (std::string_view spelled : spellings(unit)) {
        if (spelled.empty() || suffix.size() < spelled.size() ||
            suffix.substr(suffix.size() - spelled.size()) != spelled) {
            continue;
        }
        double factor = 1.0;
        if (prefix_factor(suffix.substr(0, suffix.size() - spelled.size()), factor)) {
            return number * factor;
        }
    }
    throw DomainError("'" + std::string(text) + "' needs a unit suffix in " + symbol(unit) + " (e.g. \"1m" +
                      symbol(unit) + "\")");
}

}  // namespace asmx::units
