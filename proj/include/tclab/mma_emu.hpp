// SPDX-License-Identifier: Apache-2.0
/**
 * @file   mma_emu.hpp
 * @brief  Bit-exact model of a block multiply-accumulate unit D = A*B + C.
 *
 * For each output element the unit forms exact products of low-precision
 * inputs, accumulates them in ascending k into an accumulator whose
 * significand is truncated (sign-magnitude RZ) to acc_significand_bits after
 * every addition, then adds the FP32 addend C exactly and rounds once to
 * FP32 with the terminal rounding mode. Terminal RZ models the hardware;
 * terminal RN models a unit that rounds to nearest on write-back.
 */
#pragma once

#include <tclab/fpkit.hpp>
#include <tclab/matrix.hpp>

#include <cstddef>
#include <span>

namespace tclab {

struct MmaConfig {
  FloatFormat input_format = kFp16;
  int acc_significand_bits = 25;
  Rounding terminal = Rounding::RZ;
  std::size_t block_k = 16;

  /// Per-step accumulator rounding is always RZ.
  static constexpr Rounding step_rounding = Rounding::RZ;

  /// Throws std::invalid_argument on an unusable configuration (accumulator
  /// wider than the 53-bit carrier, block_k of 0), including
  /// input formats whose pairwise products would not be exact in a double.
  void validate() const;
};

/// In-unit accumulation of sum_t a[t] * b[t] with per-step truncation.
/// Inputs are assumed to be members of the input format.
double accumulate_block(std::span<const double> a, std::span<const double> b, int acc_bits);

/// One output element: round(accumulate_block(a, b) + c, FP32, terminal).
double mma_element(std::span<const double> a, std::span<const double> b, double c,
                   const MmaConfig &cfg);

/// D = A*B + C for one fragment triple. A is m x k, B is k x n, C is m x n,
/// with k <= cfg.block_k. Throws std::invalid_argument on a dimension
/// mismatch or when an element is not a member of its fragment's format.
Matrix<double> emu_mma(const Matrix<double> &a, const Matrix<double> &b, const Matrix<double> &c,
                       const MmaConfig &cfg);

/// Feeds the accumulator back through emu_mma for each block_k-wide slice of
/// k in ascending order, so the terminal rounding hits C once per block.
/// A trailing partial block is processed as-is (equivalent to zero padding).
Matrix<double> emu_mma_chain(const Matrix<double> &a, const Matrix<double> &b,
                             const Matrix<double> &c0, const MmaConfig &cfg);

} // namespace tclab
