#include "simjudge/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "simjudge/errors.hpp"

namespace simjudge {

namespace {

void trim_fraction(std::string& s) {
    if (s.find('.') == std::string::npos) return;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
}

}  // namespace

std::string format_real(double value) {
    if (!std::isfinite(value)) throw NumericError("cannot format non-finite value");
    if (value == 0.0) return "0";

    // Round to 9 significant digits first; the notation choice depends on the
    // rounded magnitude so that e.g. 999999.9999 prints as 1e+06.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8e", value);
    std::string sci(buf);
    const auto epos = sci.find('e');
    const int exponent = std::atoi(sci.c_str() + epos + 1);
    std::string mantissa = sci.substr(0, epos);

    if (exponent >= -3 && exponent < 6) {
        const int decimals = 8 - exponent;
        std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
        std::string fixed(buf);
        trim_fraction(fixed);
        return fixed;
    }
    trim_fraction(mantissa);
    std::snprintf(buf, sizeof buf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
    return mantissa + buf;
}

double parse_real(std::string_view token) {
    if (token.empty()) throw InputError("empty numeric field");
    std::string_view body = token;
    if (body.front() == '+') body.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc::result_out_of_range) {
        throw InputError("numeric value out of range: '" + std::string(token) + "'");
    }
    if (ec != std::errc() || ptr != body.data() + body.size()) {
        throw InputError("not a number: '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) throw InputError("non-finite value: '" + std::string(token) + "'");
    return value;
}

}  // namespace simjudge
