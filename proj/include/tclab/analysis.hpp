// SPDX-License-Identifier: Apache-2.0
/**
 * @file   analysis.hpp
 * @brief  Mantissa-length and underflow statistics of the halfhalf split, and
 *         the relative-residual error metric.
 *
 * Closed-form probabilities are exact rationals. The constants are those of
 * an FP16 residual of an FP32 value: 10 stored FP16 fraction bits, FP16
 * bias 15 and 23 stored FP32 fraction bits, so l0 ranges over [0, 13].
 */
#pragma once

#include <tclab/fpkit.hpp>
#include <tclab/matrix.hpp>

#include <boost/rational.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace tclab {

using Probability = boost::rational<std::int64_t>;

/// P(l0 = n) under independent fair mantissa bits.
Probability p_l0(int n);

/// Probability that the unscaled FP16 residual of an FP32 value with
/// exponent e_v is subnormal or zero (gradual underflow or underflow).
Probability p_underflow_gradual(int e_v);

/// Probability that the unscaled FP16 residual flushes to zero.
Probability p_underflow(int e_v);

struct UnderflowPoint {
  int e_v;
  Probability p_u;
  Probability p_u_plus_gu;
};

/// Closed-form curve on every integer e_v in [e_min, e_max].
std::vector<UnderflowPoint> underflow_curve(int e_min, int e_max);

struct EmpiricalUnderflow {
  std::uint64_t samples = 0;
  std::uint64_t count_u = 0;
  std::uint64_t count_u_plus_gu = 0;

  double rate_u() const { return static_cast<double>(count_u) / static_cast<double>(samples); }
  double rate_u_plus_gu() const {
    return static_cast<double>(count_u_plus_gu) / static_cast<double>(samples);
  }
};

/// Splits `samples` FP32 values with exponent e_v and uniform 23-bit
/// fractions using the unscaled FP16 split, and counts residuals that are
/// zero (underflow) or zero-or-subnormal (underflow + gradual underflow).
/// A value whose residual is exactly zero is classified by the place just
/// below its last mantissa bit, 2^(e_v - 24), as the closed forms do.
/// The closed forms assume RZ; other modes are for sensitivity runs.
/// Throws std::invalid_argument if samples == 0 or e_v is outside the FP32
/// normal exponent range.
EmpiricalUnderflow empirical_underflow(int e_v, std::uint64_t samples, std::uint64_t seed,
                                       Rounding split_rounding = Rounding::RZ);

struct MantissaLengthDistribution {
  std::array<std::uint64_t, 24> counts{};
  std::uint64_t total = 0;

  Probability probability(int length) const;
  Probability expectation() const;
};

/// Splits every FP32 value in [1, 2) with the unscaled FP16 split and
/// tallies kept_mantissa_length.
MantissaLengthDistribution exhaustive_length_distribution(Rounding split_rounding,
                                                          unsigned threads = 1);

/// ||ref - test||_F / ||ref||_F accumulated in double. Returns 0 when both
/// norms are zero; throws std::domain_error when only the reference is zero.
double relative_residual(const Matrix<double> &test, const Matrix<double> &ref);

struct ResidualReport {
  double relative_residual = 0.0;
  std::size_t m = 0, n = 0, k = 0;
  std::string scheme;
  std::uint64_t seed = 0;
};

/// Decimal value of an exact probability.
double to_double(const Probability &p);

} // namespace tclab
