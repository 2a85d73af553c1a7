// SPDX-License-Identifier: Apache-2.0
#include <tclab/split.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace tclab {

std::string SplitScheme::name() const {
  std::string base;
  switch (kind) {
  case Kind::MarkidisHalfHalf:
    base = "markidis_halfhalf";
    break;
  case Kind::ScaledHalfHalf:
    base = "halfhalf";
    break;
  case Kind::Tf32Tf32:
    base = "tf32tf32";
    break;
  }
  return base + "_" + to_string(mode);
}

SplitPair split_value(float v, const SplitScheme &scheme) {
  const FloatFormat &fmt = scheme.format();
  const int s = scheme.scale_log2();
  const double hi = round_to_format(v, fmt, scheme.mode);
  // Both operands have at most 24 significant bits within a 26-bit window,
  // so the residual is exact in the carrier.
  const double residual = static_cast<double>(v) - hi;
  const double lo = round_to_format(std::ldexp(residual, s), fmt, scheme.mode);
  return SplitPair{hi, lo, s};
}

SplitMatrices split_matrix(const Matrix<float> &m, const SplitScheme &scheme) {
  SplitMatrices out{Matrix<double>(m.rows(), m.cols()), Matrix<double>(m.rows(), m.cols()),
                    scheme.scale_log2()};
  auto src = m.values();
  auto hi = out.hi.values();
  auto lo = out.lo.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const SplitPair p = split_value(src[i], scheme);
    hi[i] = p.hi;
    lo[i] = p.lo;
  }
  return out;
}

double reconstruct(const SplitPair &p) { return p.hi + std::ldexp(p.lo, -p.scale_log2); }

Matrix<double> reconstruct(const SplitMatrices &s) {
  Matrix<double> out(s.rows(), s.cols());
  auto hi = s.hi.values();
  auto lo = s.lo.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = reconstruct(SplitPair{hi[i], lo[i], s.scale_log2});
  return out;
}

int kept_mantissa_length(float v, const SplitPair &p) {
  if (!std::isfinite(v) || v == 0.0f)
    throw std::domain_error("kept_mantissa_length: zero or non-finite value");
  if (std::fabs(v) < FLT_MIN)
    throw std::domain_error("kept_mantissa_length: subnormal value");
  const double rec = reconstruct(p);
  if (rec == static_cast<double>(v))
    return 23;
  const double err = std::fabs(static_cast<double>(v) - rec);
  if (!std::isfinite(err))
    return 0;
  const int len = std::ilogb(v) - 1 - std::ilogb(err);
  return std::clamp(len, 0, 23);
}

const char *to_string(Representability r) {
  switch (r) {
  case Representability::high_precision:
    return "high_precision";
  case Representability::degraded:
    return "degraded";
  case Representability::out_of_range:
    return "out_of_range";
  }
  return "?";
}

int representable_bits(int e_v, const SplitScheme &scheme) {
  const FloatFormat &fmt = scheme.format();
  const int finest = fmt.min_exponent() - fmt.man_bits - scheme.scale_log2();
  return std::max(0, e_v - finest + 1);
}

Representability classify_representability(float v, const SplitScheme &scheme) {
  if (v == 0.0f)
    return Representability::high_precision;
  if (!std::isfinite(v) || std::fabs(v) < FLT_MIN)
    return Representability::out_of_range;
  if (!std::isfinite(round_to_format(v, scheme.format(), scheme.mode)))
    return Representability::out_of_range;

  const int bits = representable_bits(std::ilogb(v), scheme);
  if (bits < 2)
    return Representability::out_of_range;
  if (bits >= 2 * scheme.format().precision() - 1)
    return Representability::high_precision;
  return Representability::degraded;
}

} // namespace tclab
