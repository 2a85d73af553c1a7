// SPDX-License-Identifier: Apache-2.0
/**
 * @file   genmat.hpp
 * @brief  Seeded FP32 test-matrix generators.
 *
 * Every random draw is a pure function of (seed, row, col, draw index), so a
 * matrix does not depend on fill order or thread count.
 */
#pragma once

#include <tclab/matrix.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <variant>

namespace tclab {

/// Uniform on the open interval (lo, hi), rounded to FP32.
struct Urand {
  double lo = -1.0;
  double hi = 1.0;
};

/// (2s - 1) * 2^e * m with e uniform in [a, b], m uniform FP32 in [1, 2),
/// s uniform in {0, 1}.
struct ExpRand {
  int a = 0;
  int b = 0;
};

/// Ones on the leading diagonal, zeros elsewhere.
struct Identity {};

using Distribution = std::variant<Urand, ExpRand, Identity>;

struct MatrixSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Distribution dist = Urand{};
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for an empty interval or a reversed
  /// exponent range.
  void validate() const;
};

Matrix<float> generate(const MatrixSpec &spec);

/// The partner of the wide-range matrix in a type-2 pair is described two
/// ways: as a lower-precision band exp_rand(-35, -15) (`caption`) or as the
/// unrepresentable band exp_rand(-100, -35) (`combination_list`).
enum class Type2Variant { caption, combination_list };

/// Exponent-band input pairs (A is m x k, B is k x n):
///   1: both exp_rand(-15, 14)
///   2: A exp_rand(-15, 14), B per Type2Variant
///   3: both exp_rand(-35, -15)
///   4: A exp_rand(-100, -35), B exp_rand(-15, 14)
/// Throws std::invalid_argument for type_id outside 1..4.
std::pair<Matrix<float>, Matrix<float>> type_pair(int type_id, std::size_t m, std::size_t n,
                                                  std::size_t k, std::uint64_t seed,
                                                  Type2Variant variant = Type2Variant::combination_list);

/// Input source for an experiment: one distribution for both operands, or a
/// type 1..4 band pair.
struct BandType {
  int id = 1;
  Type2Variant variant = Type2Variant::combination_list;
};
using InputSpec = std::variant<Distribution, BandType>;

std::pair<Matrix<float>, Matrix<float>> make_inputs(const InputSpec &spec, std::size_t m,
                                                    std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

/// Parses "urand:lo,hi", "exprand:a,b", "type:N" or "identity".
InputSpec parse_input_spec(const std::string &text);
std::string to_string(const InputSpec &spec);

/// Seed for an independent stream derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace tclab
