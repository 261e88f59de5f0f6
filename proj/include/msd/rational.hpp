#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <span>
#include <string>

namespace msd {

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);

// Integers print bare; other values print with five decimals, trailing zeros trimmed.
std::string format_rational(const Rational& r);

// "{0, 0, 7, 7, 0, 0, 1}"
std::string format_pattern(std::span<const Rational> values);

}  // namespace msd
