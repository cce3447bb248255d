#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace fairalloc {

// Currency amounts are integer minor units (cents). Contract counts are
// plain signed integers. Anything that cannot stay integer (allocation
// factors, average prices, divergence) is an exact rational.
using Money = std::int64_t;
using Qty = std::int64_t;
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMinorScale = 2;       // decimal digits per currency unit
inline constexpr Money kMinorPerUnit = 100;

// Parses a decimal currency string ("100", "-11.48") into minor units.
// Rejects more than kMinorScale fractional digits. Throws std::invalid_argument.
Money parse_money(std::string_view text);

// "1011.48", "-0.07". Inverse of parse_money.
std::string format_money(Money minor_units);

// Fixed-point rendering of an exact rational, round half away from zero.
// parse/format of currency uses dp = kMinorScale; averages render at dp = 4.
std::string format_rational(const Rational& value, int decimal_places);

// Nearest integer, ties away from zero.
BigInt round_half_away(const Rational& value);

double to_double(const Rational& value);

// Scientific notation with 6 significant decimals, stable across runs.
std::string format_scientific(double value);

}  // namespace fairalloc
