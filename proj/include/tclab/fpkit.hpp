// SPDX-License-Identifier: Apache-2.0
/**
 * @file   fpkit.hpp
 * @brief  Parameterized binary floating-point formats and exact rounding.
 *
 * Every value handled here lives in a `double` carrier. Formats are
 * restricted so that each member, and each product of two members of the
 * small input formats, is exactly representable in that carrier. Rounding a
 * sum is done from an exact (sum, error) pair so that no double rounding
 * can occur even when the operands' exponents are far apart.
 */
#pragma once

#include <bit>
#include <cstdint>

namespace tclab {

enum class Rounding {
  RN,  ///< nearest, ties to even
  RNA, ///< nearest, ties away from zero
  RZ,  ///< toward zero
};

const char *to_string(Rounding mode);

/// Binary IEEE-style format: one sign bit, `exp_bits` exponent bits (the top
/// exponent code reserved for inf/NaN), `man_bits` stored fraction bits.
struct FloatFormat {
  int exp_bits;
  int man_bits;
  int bias;
  bool subnormals;

  constexpr int min_exponent() const { return 1 - bias; }
  constexpr int max_exponent() const { return (1 << exp_bits) - 2 - bias; }
  constexpr int precision() const { return man_bits + 1; }

  double max_finite() const;
  double min_normal() const;
  /// Smallest positive member (subnormal if enabled, else min_normal()).
  double min_positive() const;

  /// Throws std::invalid_argument when the format cannot be hosted exactly
  /// in the double carrier.
  void validate() const;

  friend constexpr bool operator==(const FloatFormat &, const FloatFormat &) = default;
};

inline constexpr FloatFormat kFp16{5, 10, 15, true};
inline constexpr FloatFormat kTf32{8, 10, 127, true};
inline constexpr FloatFormat kFp32{8, 23, 127, true};
/// FP32 exponent range with a 25-bit significand.
inline constexpr FloatFormat kAcc25{8, 24, 127, true};

/// Quantization step of `fmt` in the binade of `x` (x finite).
double quantum(double x, const FloatFormat &fmt);

/// Nearest member of `fmt` to `v` under `mode`. NaN and infinities pass
/// through. Overflow gives ±inf for RN/RNA and ±max_finite for RZ.
double round_to_format(double v, const FloatFormat &fmt, Rounding mode);

/// Rounds the exact value a + b (not the double sum) to `fmt`.
double round_sum_to_format(double a, double b, const FloatFormat &fmt, Rounding mode);

/// Sign-magnitude truncation of `v` to `significand_bits` bits in its own
/// binade. The exponent range is unbounded.
double truncate_significand(double v, int significand_bits);

/// truncate_significand applied to the exact value a + b.
double truncate_sum(double a, double b, int significand_bits);

/// True when `v` is a fixed point of round_to_format(., fmt, RZ).
bool is_member(double v, const FloatFormat &fmt);

/// Error-free sum: s + err == a + b exactly, s == fl(a + b).
struct TwoSum {
  double sum;
  double err;
};
TwoSum two_sum(double a, double b);

/// Sign, unbiased exponent and 23-bit fraction of a normal FP32 value.
struct Decomposed {
  int sign;
  int exponent;
  std::uint32_t mantissa;

  friend constexpr bool operator==(const Decomposed &, const Decomposed &) = default;
};

/// Throws std::domain_error for zero, subnormal, infinite, NaN, or values
/// that are not FP32 members.
Decomposed decompose(double v);
double reconstruct(const Decomposed &d);

/// Consecutive zero bits of a 23-bit fraction starting at bit 12 toward the
/// LSB. Range [0, 13].
int trailing_zero_run(std::uint32_t mantissa);

inline float fp32_from_bits(std::uint32_t bits) { return std::bit_cast<float>(bits); }
inline std::uint32_t fp32_bits(float v) { return std::bit_cast<std::uint32_t>(v); }

/// Distance in FP32 units-in-the-last-place between two finite floats,
/// counted along the ordered representation (so ±0 are 0 apart).
std::uint64_t ulp_distance(float a, float b);

} // namespace tclab
