// SPDX-License-Identifier: Apache-2.0
// tclab: CSV experiment harness for the emulated Tensor Core GEMM recipes.

#include <tclab/experiments.hpp>
#include <tclab/gemm_lab.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace {

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

struct GemmFlags {
  std::vector<std::size_t> m{16}, n{16}, k{1024};
  std::vector<std::string> schemes{"fp32_simt", "corrected3_halfhalf"};
  std::string dist = "urand:-1,1";
  std::string type2_variant = "list";
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
  std::size_t block_k = 16;
  int acc_bits = 25;
  unsigned threads = 1;

  tclab::GemmExperiment build() const {
    tclab::GemmExperiment cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.k = k;
    cfg.schemes = schemes;
    cfg.inputs = tclab::parse_input_spec(dist);
    if (auto *band = std::get_if<tclab::BandType>(&cfg.inputs))
      band->variant = type2_variant == "caption" ? tclab::Type2Variant::caption
                                                 : tclab::Type2Variant::combination_list;
    cfg.seeds = seeds;
    cfg.mma.block_k = block_k;
    cfg.mma.acc_significand_bits = acc_bits;
    cfg.threads = threads;
    return cfg;
  }
};

void add_gemm_flags(CLI::App *cmd, GemmFlags &f, bool with_schemes) {
  cmd->add_option("--m", f.m, "rows of A (comma list)")->delimiter(',')->capture_default_str();
  cmd->add_option("--n", f.n, "columns of B (comma list)")->delimiter(',')->capture_default_str();
  cmd->add_option("--k", f.k, "inner dimension (comma list)")->delimiter(',')->capture_default_str();
  if (with_schemes)
    cmd->add_option("--scheme", f.schemes, "GEMM recipes (comma list)")
        ->delimiter(',')
        ->capture_default_str();
  cmd->add_option("--dist", f.dist, "urand:lo,hi | exprand:a,b | type:1..4 | identity")
      ->capture_default_str();
  cmd->add_option("--type2-variant", f.type2_variant, "partner band for type:2")
      ->check(CLI::IsMember({"list", "caption"}))
      ->capture_default_str();
  cmd->add_option("--seeds", f.seeds, "seeds (comma list)")->delimiter(',')->capture_default_str();
  cmd->add_option("--block-k", f.block_k, "k extent of one MMA call")->capture_default_str();
  cmd->add_option("--acc-bits", f.acc_bits, "accumulator significand bits")
      ->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores")->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Bit-exact Tensor Core GEMM emulation experiments (CSV output)"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "output file (default: standard output)");

  auto *split_stats = app.add_subcommand("split-stats", "exact kept-mantissa-length distribution");
  std::string rounding = "rn";
  unsigned split_threads = 1;
  split_stats->add_option("--rounding", rounding, "rn, rna or rz")->capture_default_str();
  split_stats->add_option("--threads", split_threads, "worker threads, 0 = all cores")
      ->capture_default_str();

  auto *underflow = app.add_subcommand("underflow", "residual underflow probability per exponent");
  tclab::UnderflowConfig uf;
  underflow->add_option("--e-min", uf.e_min, "smallest exponent")->capture_default_str();
  underflow->add_option("--e-max", uf.e_max, "largest exponent")->capture_default_str();
  underflow->add_option("--samples", uf.samples, "Monte-Carlo splits per exponent")
      ->capture_default_str();
  underflow->add_option("--seed", uf.seed, "random seed")->capture_default_str();

  GemmFlags accuracy_flags, ablation_flags, delta_flags;
  auto *accuracy = app.add_subcommand("gemm-accuracy", "residual of each recipe against FP64");
  add_gemm_flags(accuracy, accuracy_flags, true);
  auto *ablation =
      app.add_subcommand("rounding-ablation", "4-term recipe with terminal RN vs RZ vs FP32");
  add_gemm_flags(ablation, ablation_flags, false);
  auto *delta = app.add_subcommand("ablate-delta", "3-term vs 4-term corrected recipe");
  add_gemm_flags(delta, delta_flags, false);

  // --out is accepted after the subcommand too.
  for (auto *cmd : {split_stats, underflow, accuracy, ablation, delta})
    cmd->add_option("--out", out_path, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  std::ostringstream csv;
  try {
    if (*split_stats)
      tclab::write_split_stats(csv, tclab::parse_rounding(rounding), split_threads);
    else if (*underflow)
      tclab::write_underflow(csv, uf);
    else if (*accuracy)
      tclab::write_gemm_accuracy(csv, accuracy_flags.build());
    else if (*ablation)
      tclab::write_rounding_ablation(csv, ablation_flags.build());
    else if (*delta)
      tclab::write_ablate_delta(csv, delta_flags.build());
  } catch (const std::invalid_argument &e) {
    std::cerr << "tclab: usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "tclab: error: " << e.what() << '\n';
    return kRunError;
  }

  if (out_path.empty()) {
    std::cout << csv.str() << std::flush;
    return std::cout ? 0 : kRunError;
  }
  std::ofstream file(out_path, std::ios::binary);
  file << csv.str();
  file.close();
  if (!file) {
    std::cerr << "tclab: error: cannot write '" << out_path << "'\n";
    return kRunError;
  }
  return 0;
}
