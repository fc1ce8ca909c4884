#pragma once

#include <string>
#include <string_view>

namespace simjudge {

// Canonical text for a real value: at most 9 significant digits, '.' as the
// decimal separator, plain notation for |x| in [1e-3, 1e6) and exponent
// notation ("1.5e-05", "2.25e+07") otherwise. Trailing zeros are trimmed.
std::string format_real(double value);

// Locale-independent parse of a complete token. Throws InputError on
// non-numeric text and on non-finite results.
double parse_real(std::string_view token);

}  // namespace simjudge
