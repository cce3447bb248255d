#include "fairalloc/money.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace fairalloc {

namespace {

[[noreturn]] void bad_money(std::string_view text) {
    throw std::invalid_argument("not a valid currency amount: '" + std::string(text) + "'");
}

}  // namespace

Money parse_money(std::string_view text) {
    if (text.empty()) bad_money(text);
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) bad_money(text);

    Money units = 0;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        int digit = text[pos] - '0';
        if (units > (INT64_MAX - digit) / 10) bad_money(text);
        units = units * 10 + digit;
        any_digit = true;
        ++pos;
    }

    Money frac = 0;
    int frac_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (frac_digits == kMinorScale) bad_money(text);  // sub-cent precision
            frac = frac * 10 + (text[pos] - '0');
            ++frac_digits;
            any_digit = true;
            ++pos;
        }
        if (frac_digits == 0) bad_money(text);  // bare trailing point
    }
    if (!any_digit || pos != text.size()) bad_money(text);
    while (frac_digits < kMinorScale) {
        frac *= 10;
        ++frac_digits;
    }

    if (units > (INT64_MAX - frac) / kMinorPerUnit) bad_money(text);
    Money value = units * kMinorPerUnit + frac;
    return negative ? -value : value;
}

std::string format_money(Money minor_units) {
    bool negative = minor_units < 0;
    unsigned long long magnitude =
        negative ? ~static_cast<unsigned long long>(minor_units) + 1ULL
                 : static_cast<unsigned long long>(minor_units);
    unsigned long long units = magnitude / kMinorPerUnit;
    unsigned long long cents = magnitude % kMinorPerUnit;
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%s%llu.%02llu", negative ? "-" : "", units, cents);
    return buffer;
}

BigInt round_half_away(const Rational& value) {
    BigInt num = numerator(value);
    BigInt den = denominator(value);  // always > 0 for cpp_rational
    BigInt quotient = num / den;      // truncates toward zero
    BigInt remainder = num % den;
    if (2 * abs(remainder) >= den) quotient += num < 0 ? -1 : 1;
    return quotient;
}

std::string format_rational(const Rational& value, int decimal_places) {
    Rational scaled = value;
    for (int i = 0; i < decimal_places; ++i) scaled *= 10;
    BigInt rounded = round_half_away(scaled);

    bool negative = rounded < 0;
    std::string digits = abs(rounded).convert_to<std::string>();
    if (static_cast<int>(digits.size()) <= decimal_places)
        digits.insert(0, decimal_places + 1 - digits.size(), '0');
    std::string out;
    if (negative) out += '-';
    out.append(digits, 0, digits.size() - decimal_places);
    if (decimal_places > 0) {
        out += '.';
        out.append(digits, digits.size() - decimal_places, decimal_places);
    }
    return out;
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

std::string format_scientific(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.6e", value);
    return buffer;
}

}  // namespace fairalloc
