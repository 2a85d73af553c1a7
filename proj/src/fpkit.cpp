// SPDX-License-Identifier: Apache-2.0
/**
 * @file   fpkit.cpp
 * @brief  Exact rounding of double-hosted values to small binary formats.
 */
#include <tclab/fpkit.hpp>

#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tclab {

const char *to_string(Rounding mode) {
  switch (mode) {
  case Rounding::RN:
    return "rn";
  case Rounding::RNA:
    return "rna";
  case Rounding::RZ:
    return "rz";
  }
  return "?";
}

double FloatFormat::max_finite() const {
  return std::ldexp(2.0 - std::ldexp(1.0, -man_bits), max_exponent());
}

double FloatFormat::min_normal() const { return std::ldexp(1.0, min_exponent()); }

double FloatFormat::min_positive() const {
  return subnormals ? std::ldexp(1.0, min_exponent() - man_bits) : min_normal();
}

void FloatFormat::validate() const {
  auto fail = [](const std::string &what) {
    throw std::invalid_argument("FloatFormat: " + what);
  };
  if (man_bits < 1)
    fail("man_bits must be >= 1");
  if (exp_bits < 2)
    fail("exp_bits must be >= 2");
  if (man_bits + exp_bits + 1 > 63)
    fail("format wider than 63 bits");
  // Midpoints and neighbours of the format grid must be distinct doubles.
  if (man_bits > 50)
    fail("man_bits must be <= 50");
  if (exp_bits > 11 || min_exponent() - man_bits < -1022 || max_exponent() > 1023)
    fail("exponent range exceeds the double carrier");
}

double quantum(double x, const FloatFormat &fmt) {
  const int emin = fmt.min_exponent();
  if (x == 0.0)
    return fmt.subnormals ? std::ldexp(1.0, emin - fmt.man_bits) : std::ldexp(1.0, emin);
  const int e = std::ilogb(x);
  if (e < emin)
    return fmt.subnormals ? std::ldexp(1.0, emin - fmt.man_bits) : std::ldexp(1.0, emin);
  return std::ldexp(1.0, e - fmt.man_bits);
}

double round_to_format(double v, const FloatFormat &fmt, Rounding mode) {
  if (!std::isfinite(v) || v == 0.0)
    return v;

  const int q_exp = std::ilogb(quantum(v, fmt));
  // |scaled| < 2^(man_bits + 1) <= 2^51, so the split below is exact.
  const double scaled = std::ldexp(std::fabs(v), -q_exp);
  double mag = std::trunc(scaled);
  const double frac = scaled - mag;

  switch (mode) {
  case Rounding::RZ:
    break;
  case Rounding::RN:
    if (frac > 0.5 || (frac == 0.5 && std::fmod(mag, 2.0) == 1.0))
      mag += 1.0;
    break;
  case Rounding::RNA:
    if (frac >= 0.5)
      mag += 1.0;
    break;
  }

  double r = std::ldexp(mag, q_exp);
  const double max = fmt.max_finite();
  if (r > max)
    r = (mode == Rounding::RZ) ? max : std::numeric_limits<double>::infinity();
  return std::copysign(r, v);
}

TwoSum two_sum(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s))
    return {s, 0.0};
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

namespace {

// A rounding breakpoint is a double at which round_to_format changes value:
// members of the grid for RZ, midpoints between members for RN/RNA.
bool is_breakpoint(double s, const FloatFormat &fmt, Rounding mode) {
  const double t = round_to_format(s, fmt, Rounding::RZ);
  if (mode == Rounding::RZ)
    return t == s;
  if (t == s)
    return false;
  return std::fabs(s - t) == 0.5 * quantum(s, fmt);
}

} // namespace

double round_sum_to_format(double a, double b, const FloatFormat &fmt, Rounding mode) {
  const auto [s, err] = two_sum(a, b);
  if (err == 0.0 || !std::isfinite(s) || !is_breakpoint(s, fmt, mode))
    return round_to_format(s, fmt, mode);
  // The exact sum lies strictly between s and its neighbour toward err, and
  // no breakpoint of the (much coarser) format grid lies in that interval.
  const double toward = err > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
  return round_to_format(std::nextafter(s, toward), fmt, mode);
}

double truncate_significand(double v, int significand_bits) {
  if (significand_bits < 1)
    throw std::invalid_argument("truncate_significand: significand_bits must be >= 1");
  if (!std::isfinite(v) || v == 0.0 || significand_bits >= DBL_MANT_DIG)
    return v;
  const int shift = std::ilogb(v) - significand_bits + 1;
  return std::ldexp(std::trunc(std::ldexp(v, -shift)), shift);
}

double truncate_sum(double a, double b, int significand_bits) {
  const auto [s, err] = two_sum(a, b);
  const double t = truncate_significand(s, significand_bits);
  if (err == 0.0 || !std::isfinite(s) || t != s)
    return t;
  // s is on the truncation grid; only an error pointing toward zero moves the
  // exact value below it.
  if ((err < 0.0) != (s < 0.0))
    return truncate_significand(std::nextafter(s, 0.0), significand_bits);
  return t;
}

bool is_member(double v, const FloatFormat &fmt) {
  return round_to_format(v, fmt, Rounding::RZ) == v;
}

Decomposed decompose(double v) {
  if (!std::isfinite(v) || v == 0.0)
    throw std::domain_error("decompose: zero or non-finite value");
  const float f = static_cast<float>(v);
  if (static_cast<double>(f) != v)
    throw std::domain_error("decompose: value is not an FP32 member");
  if (std::fabs(f) < FLT_MIN)
    throw std::domain_error("decompose: subnormal value");
  const std::uint32_t bits = fp32_bits(f);
  return Decomposed{(bits >> 31) ? -1 : 1, static_cast<int>((bits >> 23) & 0xffu) - 127,
                    bits & 0x7fffffu};
}

double reconstruct(const Decomposed &d) {
  return d.sign * std::ldexp(1.0 + std::ldexp(static_cast<double>(d.mantissa), -23), d.exponent);
}

int trailing_zero_run(std::uint32_t mantissa) {
  const std::uint32_t low = mantissa & 0x1fffu; // m12 .. m0
  if (low == 0)
    return 13;
  return std::countl_zero(low) - (32 - 13);
}

std::uint64_t ulp_distance(float a, float b) {
  auto ordered = [](float x) -> std::int64_t {
    const std::uint32_t bits = fp32_bits(x);
    const std::int64_t mag = bits & 0x7fffffffu;
    return (bits >> 31) ? -mag : mag;
  };
  const std::int64_t d = ordered(a) - ordered(b);
  return static_cast<std::uint64_t>(d < 0 ? -d : d);
}

} // namespace tclab
