#include "msd/rational.hpp"

#include <cmath>
#include <cstdio>

namespace msd {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", to_double(r));
  std::string s(buf);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string format_pattern(std::span<const Rational> values) {
  std::string s = "{";
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + format_rational(values[i]);
  return s + "}";
}

}  // namespace msd
