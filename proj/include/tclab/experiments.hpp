// SPDX-License-Identifier: Apache-2.0
/**
 * @file   experiments.hpp
 * @brief  CSV-producing experiment drivers behind the `tclab` command line.
 *
 * Output is a pure function of the arguments: rows come out in the order of
 * the size, scheme and seed lists given, whatever the thread count. FP64
 * fields are printed with 17 significant digits.
 */
#pragma once

#include <tclab/fpkit.hpp>
#include <tclab/genmat.hpp>
#include <tclab/mma_emu.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace tclab {

/// Throws std::invalid_argument unless `name` is rn, rna or rz.
Rounding parse_rounding(const std::string &name);

std::string format_fp64(double v);
/// Shortest decimal that parses back to the same float.
std::string format_fp32(float v);

void write_split_stats(std::ostream &out, Rounding rounding, unsigned threads = 1);

struct UnderflowConfig {
  int e_min = -30;
  int e_max = 14;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  Rounding split_rounding = Rounding::RZ;
};
void write_underflow(std::ostream &out, const UnderflowConfig &cfg);

struct GemmExperiment {
  std::vector<std::size_t> m{16};
  std::vector<std::size_t> n{16};
  std::vector<std::size_t> k{1024};
  std::vector<std::string> schemes{"fp32_simt", "corrected3_halfhalf"};
  InputSpec inputs = Distribution{Urand{-1.0, 1.0}};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
  MmaConfig mma{};
  unsigned threads = 1;

  /// Throws std::invalid_argument for empty lists, zero sizes or unknown
  /// schemes.
  void validate() const;
};

void write_gemm_accuracy(std::ostream &out, const GemmExperiment &cfg);
void write_rounding_ablation(std::ostream &out, const GemmExperiment &cfg);
void write_ablate_delta(std::ostream &out, const GemmExperiment &cfg);

} // namespace tclab
