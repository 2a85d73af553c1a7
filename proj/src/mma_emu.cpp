// SPDX-License-Identifier: Apache-2.0
#include <tclab/mma_emu.hpp>

#include <algorithm>
#include <cfloat>
#include <stdexcept>
#include <vector>

namespace tclab {

void MmaConfig::validate() const {
  input_format.validate();
  if (2 * input_format.precision() > DBL_MANT_DIG)
    throw std::invalid_argument("MmaConfig: input products would not be exact in the carrier");
  // Products of subnormal inputs must not underflow the carrier either.
  if (2 * (input_format.min_exponent() - input_format.man_bits) < -1074)
    throw std::invalid_argument("MmaConfig: input products would underflow the carrier");
  if (acc_significand_bits < 1 || acc_significand_bits > DBL_MANT_DIG)
    throw std::invalid_argument("MmaConfig: acc_significand_bits must be in [1, 53]");
  if (block_k < 1)
    throw std::invalid_argument("MmaConfig: block_k must be >= 1");
}

double accumulate_block(std::span<const double> a, std::span<const double> b, int acc_bits) {
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    acc = truncate_sum(acc, a[t] * b[t], acc_bits);
  return acc;
}

double mma_element(std::span<const double> a, std::span<const double> b, double c,
                   const MmaConfig &cfg) {
  return round_sum_to_format(accumulate_block(a, b, cfg.acc_significand_bits), c, kFp32,
                             cfg.terminal);
}

namespace {

void require_members(const Matrix<double> &m, const FloatFormat &fmt, const char *what) {
  for (double v : m.values())
    if (!is_member(v, fmt))
      throw std::invalid_argument(std::string("emu_mma: ") + what +
                                  " has an element outside its format");
}

} // namespace

Matrix<double> emu_mma(const Matrix<double> &a, const Matrix<double> &b, const Matrix<double> &c,
                       const MmaConfig &cfg) {
  cfg.validate();
  if (a.cols() != b.rows())
    throw std::invalid_argument("emu_mma: inner dimensions differ");
  require_same_shape(a.rows(), b.cols(), c.rows(), c.cols(), "emu_mma");
  if (a.cols() > cfg.block_k)
    throw std::invalid_argument("emu_mma: k exceeds block_k");
  require_members(a, cfg.input_format, "A");
  require_members(b, cfg.input_format, "B");
  require_members(c, kFp32, "C");

  const Matrix<double> bt = transpose(b);
  Matrix<double> d(c.rows(), c.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      d(i, j) = mma_element(a.row(i), bt.row(j), c(i, j), cfg);
  return d;
}

Matrix<double> emu_mma_chain(const Matrix<double> &a, const Matrix<double> &b,
                             const Matrix<double> &c0, const MmaConfig &cfg) {
  cfg.validate();
  if (a.cols() != b.rows())
    throw std::invalid_argument("emu_mma_chain: inner dimensions differ");
  require_same_shape(a.rows(), b.cols(), c0.rows(), c0.cols(), "emu_mma_chain");

  Matrix<double> c = c0;
  const std::size_t k = a.cols();
  for (std::size_t k0 = 0; k0 < k; k0 += cfg.block_k) {
    const std::size_t width = std::min(cfg.block_k, k - k0);
    Matrix<double> ab(a.rows(), width);
    Matrix<double> bb(width, b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t t = 0; t < width; ++t)
        ab(i, t) = a(i, k0 + t);
    for (std::size_t t = 0; t < width; ++t)
      for (std::size_t j = 0; j < b.cols(); ++j)
        bb(t, j) = b(k0 + t, j);
    c = emu_mma(ab, bb, c, cfg);
  }
  return c;
}

} // namespace tclab
