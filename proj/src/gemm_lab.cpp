// SPDX-License-Identifier: Apache-2.0
#include <tclab/gemm_lab.hpp>

#include <tclab/analysis.hpp>
#include <tclab/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>

namespace tclab {
namespace {

double fp32_add(double a, double b) { return round_sum_to_format(a, b, kFp32, Rounding::RN); }

struct NamedScheme {
  const char *name;
  GemmScheme scheme;
};

const std::vector<NamedScheme> &scheme_table() {
  static const std::vector<NamedScheme> table = {
      {"fp64_ref", GemmScheme::fp64_ref()},
      {"fp32_simt", GemmScheme::fp32_simt()},
      {"fp32_lsbtrunc", GemmScheme::fp32_lsb_trunc()},
      {"tc_plain_fp16", GemmScheme::tc_plain(kFp16)},
      {"tc_plain_tf32", GemmScheme::tc_plain(kTf32)},
      {"markidis4", GemmScheme::markidis4(kFp16)},
      {"corrected4_rn", GemmScheme::corrected4(SplitScheme::markidis(), Rounding::RN)},
      {"corrected4_rz", GemmScheme::corrected4(SplitScheme::markidis(), Rounding::RZ)},
      {"corrected3_halfhalf", GemmScheme::corrected3(SplitScheme::scaled_halfhalf())},
      {"corrected3_tf32", GemmScheme::corrected3(SplitScheme::tf32tf32())},
  };
  return table;
}

bool same_recipe(const GemmScheme &x, const GemmScheme &y) {
  if (x.kind != y.kind)
    return false;
  switch (x.kind) {
  case GemmScheme::Kind::Fp64Ref:
  case GemmScheme::Kind::Fp32Simt:
  case GemmScheme::Kind::Fp32LsbTrunc:
    return true;
  case GemmScheme::Kind::TcPlain:
  case GemmScheme::Kind::Markidis4:
    return x.format == y.format;
  case GemmScheme::Kind::Corrected4:
    return x.split == y.split && x.terminal == y.terminal;
  case GemmScheme::Kind::Corrected3:
  case GemmScheme::Kind::Corrected3DeltaDelta:
    return x.split == y.split;
  }
  return false;
}

// Low-precision operands with B stored transposed so that every output
// element reads two contiguous rows.
struct Operands {
  Matrix<double> a_hi, a_lo;
  Matrix<double> bt_hi, bt_lo;
  int scale_log2 = 0;
  bool non_finite = false;
  bool out_of_range = false;
};

bool any_non_finite(const Matrix<double> &m) {
  return std::any_of(m.values().begin(), m.values().end(),
                     [](double v) { return !std::isfinite(v); });
}

Operands split_operands(const Matrix<float> &a, const Matrix<float> &b, const SplitScheme &split) {
  const SplitMatrices sa = split_matrix(a, split);
  const SplitMatrices sb = split_matrix(transpose(b), split);
  Operands ops{sa.hi, sa.lo, sb.hi, sb.lo, split.scale_log2()};
  ops.non_finite = any_non_finite(ops.a_hi) || any_non_finite(ops.a_lo) ||
                   any_non_finite(ops.bt_hi) || any_non_finite(ops.bt_lo);
  auto classify = [&](const Matrix<float> &m) {
    return std::any_of(m.values().begin(), m.values().end(), [&](float v) {
      return classify_representability(v, split) == Representability::out_of_range;
    });
  };
  ops.out_of_range = classify(a) || classify(b);
  return ops;
}

Operands rounded_operands(const Matrix<float> &a, const Matrix<float> &b, const FloatFormat &fmt) {
  const Rounding mode = (fmt == kTf32) ? Rounding::RNA : Rounding::RN;
  Operands ops;
  auto round_all = [&](const Matrix<float> &src, Matrix<double> &dst) {
    dst = Matrix<double>(src.rows(), src.cols());
    auto s = src.values();
    auto d = dst.values();
    for (std::size_t i = 0; i < s.size(); ++i) {
      d[i] = round_to_format(s[i], fmt, mode);
      if (!std::isfinite(d[i]))
        ops.non_finite = true;
      if ((d[i] == 0.0 && s[i] != 0.0) || !std::isfinite(d[i]))
        ops.out_of_range = true;
    }
  };
  round_all(a, ops.a_hi);
  round_all(transpose(b), ops.bt_hi);
  return ops;
}

// Calls fn(first, width) for each block of the fixed k schedule.
template <class Fn> void for_each_block(std::size_t k, std::size_t block_k, Fn &&fn) {
  for (std::size_t k0 = 0; k0 < k; k0 += block_k)
    fn(k0, std::min(block_k, k - k0));
}

Matrix<float> clear_lsb(const Matrix<float> &m) {
  Matrix<float> out = m;
  for (float &v : out.values())
    v = fp32_from_bits(fp32_bits(v) & ~1u);
  return out;
}

void fp32_simt(const Matrix<float> &a, const Matrix<float> &b, Matrix<double> &out,
               unsigned threads) {
  const Matrix<float> bt = transpose(b);
  parallel_for(out.rows(), threads, [&](std::size_t i) {
    auto ar = a.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto br = bt.row(j);
      float acc = 0.0f;
      for (std::size_t t = 0; t < ar.size(); ++t) {
        const float p = ar[t] * br[t];
        acc = acc + p;
      }
      out(i, j) = acc;
    }
  });
}

void fp64_ref(const Matrix<float> &a, const Matrix<float> &b, Matrix<double> &out,
              unsigned threads) {
  const Matrix<double> ad = matrix_cast<double>(a);
  const Matrix<double> bt = matrix_cast<double>(transpose(b));
  parallel_for(out.rows(), threads, [&](std::size_t i) {
    auto ar = ad.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto br = bt.row(j);
      double acc = 0.0;
      for (std::size_t t = 0; t < ar.size(); ++t)
        acc = acc + ar[t] * br[t];
      out(i, j) = acc;
    }
  });
}

// Element kernels. `unit` is the in-unit configuration (input format and
// terminal rounding already fixed by the recipe).
using Row = std::span<const double>;

double tc_plain_element(Row a, Row b, std::size_t block_k, const MmaConfig &unit) {
  double c = 0.0;
  for_each_block(a.size(), block_k, [&](std::size_t k0, std::size_t w) {
    c = mma_element(a.subspan(k0, w), b.subspan(k0, w), c, unit);
  });
  return c;
}

double four_term_element(Row a, Row da, Row b, Row db, std::size_t block_k,
                         const MmaConfig &unit) {
  double c = 0.0;
  for_each_block(a.size(), block_k, [&](std::size_t k0, std::size_t w) {
    const Row ab = a.subspan(k0, w), dab = da.subspan(k0, w);
    const Row bb = b.subspan(k0, w), dbb = db.subspan(k0, w);
    c = mma_element(dab, dbb, c, unit);
    c = mma_element(dab, bb, c, unit);
    c = mma_element(ab, dbb, c, unit);
    c = mma_element(ab, bb, c, unit);
  });
  return c;
}

double three_term_element(Row a, Row da, Row b, Row db, int scale_log2, bool delta_delta,
                          std::size_t block_k, const MmaConfig &unit) {
  double c = 0.0;
  double dc = 0.0;
  double ddc = 0.0;
  for_each_block(a.size(), block_k, [&](std::size_t k0, std::size_t w) {
    const Row ab = a.subspan(k0, w), dab = da.subspan(k0, w);
    const Row bb = b.subspan(k0, w), dbb = db.subspan(k0, w);
    dc = mma_element(dab, bb, dc, unit);
    dc = mma_element(ab, dbb, dc, unit);
    if (delta_delta)
      ddc = mma_element(dab, dbb, ddc, unit);
    const double tmp = mma_element(ab, bb, 0.0, unit);
    c = fp32_add(c, tmp);
  });
  if (delta_delta)
    dc = fp32_add(dc, std::ldexp(ddc, -scale_log2));
  return fp32_add(c, std::ldexp(dc, -scale_log2));
}

} // namespace

GemmScheme GemmScheme::markidis4(const FloatFormat &fmt) {
  const SplitScheme split = (fmt == kTf32) ? SplitScheme::tf32tf32() : SplitScheme::markidis();
  return {Kind::Markidis4, fmt, split, Rounding::RZ};
}

GemmScheme GemmScheme::corrected4(const SplitScheme &split, Rounding terminal) {
  if (split.scale_log2() != 0)
    throw std::invalid_argument("corrected4: the four-term recipe needs an unscaled split");
  return {Kind::Corrected4, split.format(), split, terminal};
}

std::string GemmScheme::name() const {
  for (const auto &entry : scheme_table())
    if (same_recipe(entry.scheme, *this))
      return entry.name;
  switch (kind) {
  case Kind::TcPlain:
    return "tc_plain_custom";
  case Kind::Markidis4:
    return "markidis4_" + split.name();
  case Kind::Corrected4:
    return "corrected4_" + split.name() + "_" + to_string(terminal);
  case Kind::Corrected3:
    return "corrected3_" + split.name();
  case Kind::Corrected3DeltaDelta:
    return "corrected3dd_" + split.name();
  default:
    return "unknown";
  }
}

GemmScheme GemmScheme::from_name(std::string_view name) {
  for (const auto &entry : scheme_table())
    if (name == entry.name)
      return entry.scheme;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

const std::vector<std::string> &GemmScheme::names() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out;
    for (const auto &entry : scheme_table())
      out.emplace_back(entry.name);
    return out;
  }();
  return list;
}

std::string GemmRun::flags() const {
  if (saw_out_of_range && saw_overflow)
    return "out_of_range+overflow";
  if (saw_out_of_range)
    return "out_of_range";
  if (saw_overflow)
    return "overflow";
  return "none";
}

GemmRun gemm(const Matrix<float> &a, const Matrix<float> &b, const GemmScheme &scheme,
             const MmaConfig &cfg, unsigned threads) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("gemm: inner dimensions differ");

  GemmRun run;
  run.m = a.rows();
  run.n = b.cols();
  run.k = a.cols();
  run.scheme = scheme;
  run.output = Matrix<double>(run.m, run.n);

  MmaConfig unit = cfg;
  unit.input_format = scheme.format;
  unit.terminal = Rounding::RZ;
  unit.validate();

  using Kind = GemmScheme::Kind;
  switch (scheme.kind) {
  case Kind::Fp64Ref:
    fp64_ref(a, b, run.output, threads);
    break;
  case Kind::Fp32Simt:
    fp32_simt(a, b, run.output, threads);
    break;
  case Kind::Fp32LsbTrunc:
    fp32_simt(clear_lsb(a), clear_lsb(b), run.output, threads);
    break;
  case Kind::TcPlain: {
    const Operands ops = rounded_operands(a, b, scheme.format);
    run.saw_out_of_range = ops.out_of_range;
    run.saw_overflow = ops.non_finite;
    parallel_for(run.m, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < run.n; ++j)
        run.output(i, j) = tc_plain_element(ops.a_hi.row(i), ops.bt_hi.row(j), cfg.block_k, unit);
    });
    break;
  }
  case Kind::Markidis4:
  case Kind::Corrected4: {
    if (scheme.split.scale_log2() != 0)
      throw std::invalid_argument("gemm: the four-term recipe needs an unscaled split");
    if (scheme.kind == Kind::Corrected4)
      unit.terminal = scheme.terminal;
    const Operands ops = split_operands(a, b, scheme.split);
    run.saw_out_of_range = ops.out_of_range;
    run.saw_overflow = ops.non_finite;
    parallel_for(run.m, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < run.n; ++j)
        run.output(i, j) = four_term_element(ops.a_hi.row(i), ops.a_lo.row(i), ops.bt_hi.row(j),
                                             ops.bt_lo.row(j), cfg.block_k, unit);
    });
    break;
  }
  case Kind::Corrected3:
  case Kind::Corrected3DeltaDelta: {
    const Operands ops = split_operands(a, b, scheme.split);
    const bool dd = scheme.kind == Kind::Corrected3DeltaDelta;
    run.saw_out_of_range = ops.out_of_range;
    run.saw_overflow = ops.non_finite;
    parallel_for(run.m, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < run.n; ++j)
        run.output(i, j) =
            three_term_element(ops.a_hi.row(i), ops.a_lo.row(i), ops.bt_hi.row(j),
                               ops.bt_lo.row(j), ops.scale_log2, dd, cfg.block_k, unit);
    });
    break;
  }
  }

  if (any_non_finite(run.output))
    run.saw_overflow = true;
  return run;
}

double residual_against(const GemmRun &run, const GemmRun &reference) {
  return relative_residual(run.output, reference.output);
}

double mean(const std::vector<double> &values) {
  if (values.empty())
    return 0.0;
  double sum = 0.0;
  for (double v : values)
    sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<TerminalRoundingRow> compare_terminal_rounding(const std::vector<Size3> &sizes,
                                                           const InputSpec &inputs,
                                                           const std::vector<std::uint64_t> &seeds,
                                                           const MmaConfig &cfg,
                                                           unsigned threads) {
  const GemmScheme rn = GemmScheme::corrected4(SplitScheme::markidis(), Rounding::RN);
  const GemmScheme rz = GemmScheme::corrected4(SplitScheme::markidis(), Rounding::RZ);
  std::vector<TerminalRoundingRow> rows;
  for (const Size3 &size : sizes) {
    TerminalRoundingRow row{size.m, size.n, size.k, seeds, {}, {}, {}};
    for (std::uint64_t seed : seeds) {
      const auto [a, b] = make_inputs(inputs, size.m, size.n, size.k, seed);
      const GemmRun ref = gemm(a, b, GemmScheme::fp64_ref(), cfg, threads);
      row.rn.push_back(residual_against(gemm(a, b, rn, cfg, threads), ref));
      row.rz.push_back(residual_against(gemm(a, b, rz, cfg, threads), ref));
      row.fp32.push_back(residual_against(gemm(a, b, GemmScheme::fp32_simt(), cfg, threads), ref));
    }
    row.mean_rn = mean(row.rn);
    row.mean_rz = mean(row.rz);
    row.mean_fp32 = mean(row.fp32);
    rows.push_back(std::move(row));
  }
  return rows;
}

DeltaAblation delta_term_ablation(const Matrix<float> &a, const Matrix<float> &b,
                                  const SplitScheme &split, const MmaConfig &cfg,
                                  unsigned threads) {
  DeltaAblation out{gemm(a, b, GemmScheme::corrected3(split), cfg, threads),
                    gemm(a, b, GemmScheme::corrected3_delta_delta(split), cfg, threads), 0};
  auto c3 = out.three_term.output.values();
  auto c4 = out.four_term.output.values();
  for (std::size_t i = 0; i < c3.size(); ++i)
    out.max_ulp_diff = std::max(
        out.max_ulp_diff, ulp_distance(static_cast<float>(c3[i]), static_cast<float>(c4[i])));
  return out;
}

} // namespace tclab
