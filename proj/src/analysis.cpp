// SPDX-License-Identifier: Apache-2.0
#include <tclab/analysis.hpp>

#include <tclab/parallel.hpp>
#include <tclab/split.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace tclab {
namespace {

constexpr int kFp16Fraction = 10;
constexpr int kFp16Bias = 15;
constexpr int kFp32Fraction = 23;
constexpr int kMaxL0 = kFp32Fraction - kFp16Fraction;

Probability pow_half(int n) { return Probability(1, std::int64_t{1} << n); }

Probability tail_from(int first) {
  Probability sum = 0;
  for (int l = std::max(first, 0); l <= kMaxL0; ++l)
    sum += p_l0(l);
  return sum;
}

} // namespace

double to_double(const Probability &p) {
  return static_cast<double>(p.numerator()) / static_cast<double>(p.denominator());
}

Probability p_l0(int n) {
  if (n < 0 || n > kMaxL0)
    return 0;
  if (n == kMaxL0)
    return pow_half(kMaxL0);
  return pow_half(n + 1);
}

// Residual exponent is e_v - (l0 + 11); it is below the FP16 normal range
// when e_v - 10 + 15 - 2 < l0.
Probability p_underflow_gradual(int e_v) {
  return tail_from(e_v - kFp16Fraction + kFp16Bias - 2 + 1);
}

// ... and below the smallest FP16 subnormal when e_v + 15 - 2 < l0.
Probability p_underflow(int e_v) { return tail_from(e_v + kFp16Bias - 2 + 1); }

std::vector<UnderflowPoint> underflow_curve(int e_min, int e_max) {
  if (e_min > e_max)
    throw std::invalid_argument("underflow_curve: e_min > e_max");
  std::vector<UnderflowPoint> points;
  for (int e = e_min; e <= e_max; ++e)
    points.push_back({e, p_underflow(e), p_underflow_gradual(e)});
  return points;
}

EmpiricalUnderflow empirical_underflow(int e_v, std::uint64_t samples, std::uint64_t seed,
                                       Rounding split_rounding) {
  if (samples == 0)
    throw std::invalid_argument("empirical_underflow: samples must be >= 1");
  if (e_v < -126 || e_v > 127)
    throw std::invalid_argument("empirical_underflow: e_v outside the FP32 normal range");

  const SplitScheme scheme = SplitScheme::markidis(split_rounding);
  const double fp16_min_normal = kFp16.min_normal();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> fraction(0, (1u << 23) - 1);

  EmpiricalUnderflow out;
  out.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto v = static_cast<float>(
        std::ldexp(1.0 + std::ldexp(static_cast<double>(fraction(rng)), -23), e_v));
    const SplitPair pair = split_value(v, scheme);
    const double lo = pair.lo;
    if (static_cast<double>(v) == pair.hi) {
      // Nothing to represent (l0 = 13). Following the l0 convention the
      // residual sits one place below m0, at exponent e_v - 24.
      const double slot = std::ldexp(1.0, e_v - 24);
      if (slot < kFp16.min_positive())
        ++out.count_u;
      if (slot < fp16_min_normal)
        ++out.count_u_plus_gu;
    } else if (lo == 0.0) {
      ++out.count_u;
      ++out.count_u_plus_gu;
    } else if (std::fabs(lo) < fp16_min_normal) {
      ++out.count_u_plus_gu;
    }
  }
  return out;
}

Probability MantissaLengthDistribution::probability(int length) const {
  if (length < 0 || length >= static_cast<int>(counts.size()) || total == 0)
    return 0;
  return Probability(static_cast<std::int64_t>(counts[static_cast<std::size_t>(length)]),
                     static_cast<std::int64_t>(total));
}

Probability MantissaLengthDistribution::expectation() const {
  Probability e = 0;
  for (int len = 0; len < static_cast<int>(counts.size()); ++len)
    e += probability(len) * len;
  return e;
}

MantissaLengthDistribution exhaustive_length_distribution(Rounding split_rounding,
                                                          unsigned threads) {
  constexpr std::uint32_t kMantissas = 1u << 23;
  constexpr std::uint32_t kChunks = 64;
  const SplitScheme scheme = SplitScheme::markidis(split_rounding);

  std::vector<std::array<std::uint64_t, 24>> partial(kChunks);
  parallel_for(kChunks, threads, [&](std::size_t c) {
    auto &counts = partial[c];
    counts.fill(0);
    const std::uint32_t begin = static_cast<std::uint32_t>(c) * (kMantissas / kChunks);
    const std::uint32_t end = begin + kMantissas / kChunks;
    for (std::uint32_t m = begin; m < end; ++m) {
      const float v = fp32_from_bits(0x3f800000u | m);
      ++counts[static_cast<std::size_t>(kept_mantissa_length(v, split_value(v, scheme)))];
    }
  });

  MantissaLengthDistribution dist;
  for (const auto &counts : partial)
    for (std::size_t len = 0; len < counts.size(); ++len)
      dist.counts[len] += counts[len];
  dist.total = kMantissas;
  return dist;
}

double relative_residual(const Matrix<double> &test, const Matrix<double> &ref) {
  require_same_shape(test.rows(), test.cols(), ref.rows(), ref.cols(), "relative_residual");
  double num = 0.0;
  double den = 0.0;
  auto t = test.values();
  auto r = ref.values();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = r[i] - t[i];
    num += d * d;
    den += r[i] * r[i];
  }
  if (den == 0.0) {
    if (num == 0.0)
      return 0.0;
    throw std::domain_error("relative_residual: zero reference with nonzero difference");
  }
  return std::sqrt(num) / std::sqrt(den);
}

} // namespace tclab
