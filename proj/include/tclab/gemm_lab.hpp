// SPDX-License-Identifier: Apache-2.0
/**
 * @file   gemm_lab.hpp
 * @brief  Single-precision GEMM recipes built on the emulated MMA unit.
 *
 * All recipes accumulate each output element in ascending k over a fixed
 * block_k schedule; only output elements are computed in parallel, so results
 * are bit-identical for any thread count.
 *
 * In-unit accumulation (anything passed through mma_element) always uses the
 * hardware terminal rounding RZ, except for Corrected4, whose terminal mode
 * is a scheme parameter. cfg.input_format and cfg.terminal are therefore
 * ignored here; cfg supplies the accumulator width and block_k.
 */
#pragma once

#include <tclab/genmat.hpp>
#include <tclab/matrix.hpp>
#include <tclab/mma_emu.hpp>
#include <tclab/split.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tclab {

struct GemmScheme {
  enum class Kind {
    Fp64Ref,      ///< double products and sums, double output
    Fp32Simt,     ///< FP32 product then FP32 sum, both RN
    Fp32LsbTrunc, ///< inputs' last fraction bit cleared, then Fp32Simt
    TcPlain,      ///< inputs rounded to `format`, accumulated in-unit
    Markidis4,    ///< four split terms, one in-unit accumulator
    Corrected4,   ///< Markidis4 with a chosen split and terminal rounding
    Corrected3,   ///< main term accumulated outside the unit, two delta terms
    Corrected3DeltaDelta, ///< Corrected3 plus the delta*delta term
  };

  Kind kind = Kind::Fp32Simt;
  FloatFormat format = kFp16;
  SplitScheme split = SplitScheme::scaled_halfhalf();
  Rounding terminal = Rounding::RZ;

  static GemmScheme fp64_ref() { return {Kind::Fp64Ref}; }
  static GemmScheme fp32_simt() { return {Kind::Fp32Simt}; }
  static GemmScheme fp32_lsb_trunc() { return {Kind::Fp32LsbTrunc}; }
  static GemmScheme tc_plain(const FloatFormat &fmt) { return {Kind::TcPlain, fmt}; }
  static GemmScheme markidis4(const FloatFormat &fmt = kFp16);
  /// `split` must be unscaled (Markidis halfhalf or tf32tf32).
  static GemmScheme corrected4(const SplitScheme &split, Rounding terminal);
  static GemmScheme corrected3(const SplitScheme &split) {
    return {Kind::Corrected3, split.format(), split};
  }
  static GemmScheme corrected3_delta_delta(const SplitScheme &split) {
    return {Kind::Corrected3DeltaDelta, split.format(), split};
  }

  /// Command-line name for the named recipes (fp64_ref, fp32_simt,
  /// fp32_lsbtrunc, tc_plain_fp16, tc_plain_tf32, markidis4, corrected4_rn,
  /// corrected4_rz, corrected3_halfhalf, corrected3_tf32); a descriptive
  /// label otherwise.
  std::string name() const;

  /// Throws std::invalid_argument for an unknown name.
  static GemmScheme from_name(std::string_view name);
  static const std::vector<std::string> &names();
};

struct GemmRun {
  std::size_t m = 0, n = 0, k = 0;
  GemmScheme scheme;
  Matrix<double> output;
  bool saw_overflow = false;
  bool saw_out_of_range = false;

  /// "none", "out_of_range", "overflow" or "out_of_range+overflow".
  std::string flags() const;
};

/// A is m x k, B is k x n. Throws std::invalid_argument on a dimension
/// mismatch or an invalid scheme/config. threads == 0 uses all hardware
/// threads.
GemmRun gemm(const Matrix<float> &a, const Matrix<float> &b, const GemmScheme &scheme,
             const MmaConfig &cfg = {}, unsigned threads = 1);

/// Averaged residuals of the same-split 4-term recipe with terminal RN and
/// with terminal RZ, against Fp32Simt.
struct TerminalRoundingRow {
  std::size_t m = 0, n = 0, k = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> rn, rz, fp32;
  double mean_rn = 0.0, mean_rz = 0.0, mean_fp32 = 0.0;
};

struct Size3 {
  std::size_t m, n, k;
};

std::vector<TerminalRoundingRow> compare_terminal_rounding(const std::vector<Size3> &sizes,
                                                           const InputSpec &inputs,
                                                           const std::vector<std::uint64_t> &seeds,
                                                           const MmaConfig &cfg = {},
                                                           unsigned threads = 1);

struct DeltaAblation {
  GemmRun three_term;
  GemmRun four_term;
  std::uint64_t max_ulp_diff = 0;
};

/// Runs Corrected3 and Corrected3DeltaDelta on the same split and reports
/// the largest elementwise FP32 ulp distance.
DeltaAblation delta_term_ablation(const Matrix<float> &a, const Matrix<float> &b,
                                  const SplitScheme &split, const MmaConfig &cfg = {},
                                  unsigned threads = 1);

/// Residual of `run` against an Fp64Ref run, for convenience.
double residual_against(const GemmRun &run, const GemmRun &reference);

double mean(const std::vector<double> &values);

} // namespace tclab
