#pragma once

#include <string_view>

namespace asmx::units {

enum class Unit { volt, ampere, ohm, farad, hertz, second, kelvin, watt, per_volt, amp_per_volt2 };

/// Canonical suffix, e.g. "V", "Ohm", "A/V2".
const char* symbol(Unit unit);

/// Parses "<number><SI prefix><unit>", e.g. "200nA", "3.5MOhm", "50 fF",
/// "-0.3V", "infV". The unit suffix is mandatory. Throws DomainError.
double parse_quantity(std::string_view text, Unit unit);

}  // namespace asmx::units
