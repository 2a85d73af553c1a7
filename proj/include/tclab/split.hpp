// SPDX-License-Identifier: Apache-2.0
/**
 * @file   split.hpp
 * @brief  Two-term low-precision representations of FP32 values.
 *
 * A value v is written as hi + lo * 2^-s where
 *   hi = round(v, fmt, mode)
 *   lo = round((v - hi) * 2^s, fmt, mode)
 * with fmt = FP16 (s = 0 or 11) or TF32 (s = 0).
 */
#pragma once

#include <tclab/fpkit.hpp>
#include <tclab/matrix.hpp>

#include <string>

namespace tclab {

struct SplitScheme {
  enum class Kind {
    MarkidisHalfHalf, ///< FP16 hi/lo, unscaled residual
    ScaledHalfHalf,   ///< FP16 hi/lo, residual scaled by 2^11
    Tf32Tf32,         ///< TF32 hi/lo, unscaled residual
  };

  Kind kind = Kind::ScaledHalfHalf;
  Rounding mode = Rounding::RN;

  static SplitScheme markidis(Rounding mode = Rounding::RN) { return {Kind::MarkidisHalfHalf, mode}; }
  static SplitScheme scaled_halfhalf(Rounding mode = Rounding::RN) { return {Kind::ScaledHalfHalf, mode}; }
  static SplitScheme tf32tf32(Rounding mode = Rounding::RNA) { return {Kind::Tf32Tf32, mode}; }

  const FloatFormat &format() const { return kind == Kind::Tf32Tf32 ? kTf32 : kFp16; }
  int scale_log2() const { return kind == Kind::ScaledHalfHalf ? 11 : 0; }
  std::string name() const;

  friend bool operator==(const SplitScheme &, const SplitScheme &) = default;
};

struct SplitPair {
  double hi = 0.0;
  double lo = 0.0;
  int scale_log2 = 0;
};

struct SplitMatrices {
  Matrix<double> hi;
  Matrix<double> lo;
  int scale_log2 = 0;

  std::size_t rows() const { return hi.rows(); }
  std::size_t cols() const { return hi.cols(); }
};

SplitPair split_value(float v, const SplitScheme &scheme);
SplitMatrices split_matrix(const Matrix<float> &m, const SplitScheme &scheme);

/// hi + lo * 2^-scale_log2, exact in the carrier.
double reconstruct(const SplitPair &p);
Matrix<double> reconstruct(const SplitMatrices &s);

/// Number of FP32 fraction bits recovered by the pair: 23 when the
/// reconstruction is exact, otherwise e_v - 1 - floor(log2 |v - rec|)
/// clamped to [0, 23]. Throws std::domain_error for zero, subnormal or
/// non-finite v.
int kept_mantissa_length(float v, const SplitPair &p);

enum class Representability { high_precision, degraded, out_of_range };

const char *to_string(Representability r);

/// Number of leading significand bits of a value with exponent e_v that the
/// scheme's pair can hold, limited by the finest quantum of the lo term
/// (the format's smallest subnormal times 2^-s). Not capped at the pair's
/// 2 * precision bits.
int representable_bits(int e_v, const SplitScheme &scheme);

/// Exponent-band classification:
///   out_of_range   hi overflows, v is not an FP32 normal (or zero), or the
///                  pair keeps fewer than 2 bits of v;
///   high_precision the pair keeps at least 2 * precision - 1 bits (21 for
///                  both FP16 and TF32);
///   degraded       anything in between.
Representability classify_representability(float v, const SplitScheme &scheme);

} // namespace tclab
