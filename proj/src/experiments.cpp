// SPDX-License-Identifier: Apache-2.0
#include <tclab/experiments.hpp>

#include <tclab/analysis.hpp>
#include <tclab/gemm_lab.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace tclab {

Rounding parse_rounding(const std::string &name) {
  if (name == "rn")
    return Rounding::RN;
  if (name == "rna")
    return Rounding::RNA;
  if (name == "rz")
    return Rounding::RZ;
  throw std::invalid_argument("unknown rounding '" + name + "' (expected rn, rna or rz)");
}

std::string format_fp64(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_fp32(float v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_split_stats(std::ostream &out, Rounding rounding, unsigned threads) {
  const MantissaLengthDistribution dist = exhaustive_length_distribution(rounding, threads);
  out << "length,prob_num,prob_den\n";
  for (int len = 0; len < static_cast<int>(dist.counts.size()); ++len) {
    const Probability p = dist.probability(len);
    if (p.numerator() == 0)
      continue;
    out << len << ',' << p.numerator() << ',' << p.denominator() << '\n';
  }
  out << "expectation," << format_fp64(to_double(dist.expectation())) << '\n';
}

void write_underflow(std::ostream &out, const UnderflowConfig &cfg) {
  if (cfg.e_min > cfg.e_max)
    throw std::invalid_argument("underflow: e-min must not exceed e-max");
  if (cfg.samples == 0)
    throw std::invalid_argument("underflow: samples must be >= 1");
  out << "e_v,p_u_theory,p_ugu_theory,p_u_emp,p_ugu_emp,samples\n";
  for (const UnderflowPoint &pt : underflow_curve(cfg.e_min, cfg.e_max)) {
    const EmpiricalUnderflow emp =
        empirical_underflow(pt.e_v, cfg.samples, derive_seed(cfg.seed, static_cast<std::uint64_t>(
                                                                           pt.e_v + 1000)),
                            cfg.split_rounding);
    out << pt.e_v << ',' << format_fp64(to_double(pt.p_u)) << ','
        << format_fp64(to_double(pt.p_u_plus_gu)) << ',' << format_fp64(emp.rate_u()) << ','
        << format_fp64(emp.rate_u_plus_gu()) << ',' << cfg.samples << '\n';
  }
}

void GemmExperiment::validate() const {
  if (m.empty() || n.empty() || k.empty() || seeds.empty())
    throw std::invalid_argument("size and seed lists must not be empty");
  auto has_zero = [](const std::vector<std::size_t> &v) {
    return std::find(v.begin(), v.end(), std::size_t{0}) != v.end();
  };
  if (has_zero(m) || has_zero(n) || has_zero(k))
    throw std::invalid_argument("matrix sizes must be positive");
  for (const auto &s : schemes)
    GemmScheme::from_name(s);
  mma.validate();
}

namespace {

template <class Fn> void for_each_size(const GemmExperiment &cfg, Fn &&fn) {
  for (std::size_t m : cfg.m)
    for (std::size_t n : cfg.n)
      for (std::size_t k : cfg.k)
        fn(m, n, k);
}

std::string merge_flags(const std::vector<GemmRun> &runs) {
  GemmRun merged;
  for (const auto &r : runs) {
    merged.saw_overflow |= r.saw_overflow;
    merged.saw_out_of_range |= r.saw_out_of_range;
  }
  return merged.flags();
}

} // namespace

void write_gemm_accuracy(std::ostream &out, const GemmExperiment &cfg) {
  cfg.validate();
  std::vector<GemmScheme> schemes;
  for (const auto &s : cfg.schemes)
    schemes.push_back(GemmScheme::from_name(s));

  out << "m,n,k,scheme,seed,residual,flags\n";
  for_each_size(cfg, [&](std::size_t m, std::size_t n, std::size_t k) {
    // residuals[scheme][seed]
    std::vector<std::vector<double>> residuals(schemes.size());
    std::vector<std::vector<GemmRun>> runs(schemes.size());
    for (std::uint64_t seed : cfg.seeds) {
      const auto [a, b] = make_inputs(cfg.inputs, m, n, k, seed);
      const GemmRun ref = gemm(a, b, GemmScheme::fp64_ref(), cfg.mma, cfg.threads);
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        GemmRun run = gemm(a, b, schemes[s], cfg.mma, cfg.threads);
        residuals[s].push_back(residual_against(run, ref));
        run.output = {};
        runs[s].push_back(std::move(run));
      }
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const std::string prefix = std::to_string(m) + ',' + std::to_string(n) + ',' +
                                 std::to_string(k) + ',' + cfg.schemes[s] + ',';
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        out << prefix << cfg.seeds[i] << ',' << format_fp64(residuals[s][i]) << ','
            << runs[s][i].flags() << '\n';
      out << prefix << "mean," << format_fp64(mean(residuals[s])) << ',' << merge_flags(runs[s])
          << '\n';
    }
  });
}

void write_rounding_ablation(std::ostream &out, const GemmExperiment &cfg) {
  cfg.validate();
  std::vector<Size3> sizes;
  for_each_size(cfg, [&](std::size_t m, std::size_t n, std::size_t k) { sizes.push_back({m, n, k}); });
  const auto rows = compare_terminal_rounding(sizes, cfg.inputs, cfg.seeds, cfg.mma, cfg.threads);

  out << "m,n,k,seed,residual_rn,residual_rz,residual_fp32\n";
  for (const auto &row : rows) {
    const std::string prefix =
        std::to_string(row.m) + ',' + std::to_string(row.n) + ',' + std::to_string(row.k) + ',';
    for (std::size_t i = 0; i < row.seeds.size(); ++i)
      out << prefix << row.seeds[i] << ',' << format_fp64(row.rn[i]) << ','
          << format_fp64(row.rz[i]) << ',' << format_fp64(row.fp32[i]) << '\n';
    out << prefix << "mean," << format_fp64(row.mean_rn) << ',' << format_fp64(row.mean_rz) << ','
        << format_fp64(row.mean_fp32) << '\n';
  }
}

void write_ablate_delta(std::ostream &out, const GemmExperiment &cfg) {
  cfg.validate();
  const SplitScheme split = SplitScheme::scaled_halfhalf();
  out << "m,n,k,seed,residual_3term,residual_4term,max_ulp_diff\n";
  for_each_size(cfg, [&](std::size_t m, std::size_t n, std::size_t k) {
    const std::string prefix =
        std::to_string(m) + ',' + std::to_string(n) + ',' + std::to_string(k) + ',';
    std::vector<double> r3, r4;
    std::uint64_t worst = 0;
    for (std::uint64_t seed : cfg.seeds) {
      const auto [a, b] = make_inputs(cfg.inputs, m, n, k, seed);
      const GemmRun ref = gemm(a, b, GemmScheme::fp64_ref(), cfg.mma, cfg.threads);
      const DeltaAblation abl = delta_term_ablation(a, b, split, cfg.mma, cfg.threads);
      r3.push_back(residual_against(abl.three_term, ref));
      r4.push_back(residual_against(abl.four_term, ref));
      worst = std::max(worst, abl.max_ulp_diff);
      out << prefix << seed << ',' << format_fp64(r3.back()) << ',' << format_fp64(r4.back())
          << ',' << abl.max_ulp_diff << '\n';
    }
    out << prefix << "mean," << format_fp64(mean(r3)) << ',' << format_fp64(mean(r4)) << ','
        << worst << '\n';
  });
}

} // namespace tclab
