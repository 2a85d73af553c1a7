// SPDX-License-Identifier: Apache-2.0
#include <tclab/experiments.hpp>

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tclab;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string &args) {
  const std::string cmd = std::string("\"") + TCLAB_CLI_PATH + "\" " + args + " 2>/dev/null";
  Result r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::string> lines(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');)
    out.push_back(f);
  return out;
}

} // namespace

TEST_CASE("split-stats") {
  const Result rn = run("split-stats --rounding rn");
  REQUIRE(rn.status == 0);
  CHECK(rn.out == "length,prob_num,prob_den\n22,1,4\n23,3,4\nexpectation,22.75\n");

  const Result rz = run("split-stats --rounding rz --threads 2");
  REQUIRE(rz.status == 0);
  CHECK(rz.out == "length,prob_num,prob_den\n21,1,4\n22,1,4\n23,1,2\nexpectation,22.25\n");

  const Result rna = run("split-stats --rounding rna");
  CHECK(rna.status == 0);
  CHECK(rna.out == rn.out);

  CHECK(run("split-stats --rounding rd").status != 0);
}

TEST_CASE("underflow") {
  const Result r = run("underflow --e-min -14 --e-max 12 --samples 20000 --seed 3");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 28);
  CHECK(rows[0] == "e_v,p_u_theory,p_ugu_theory,p_u_emp,p_ugu_emp,samples");
  CHECK(rows[1] == "-14,1,1,1,1,20000");
  CHECK(rows.back() == "12,0,0,0,0,20000");
  const auto zero = fields(rows[15]);
  REQUIRE(zero.size() == 6);
  CHECK(zero[0] == "0");
  CHECK(zero[1] == "0");
  CHECK(zero[2] == "0.0625");
  CHECK(std::fabs(std::stod(zero[4]) - 0.0625) < 4 * std::sqrt(0.0625 * 0.9375 / 20000));

  CHECK(run("underflow --e-min -14 --e-max 12 --samples 20000 --seed 3").out == r.out);
  CHECK(run("underflow --e-min 2 --e-max 1").status != 0);
  CHECK(run("underflow --samples 0").status != 0);
}

TEST_CASE("gemm-accuracy") {
  const std::string args =
      "gemm-accuracy --m 16 --n 8 --k 64,100 --scheme fp32_simt,corrected3_tf32,markidis4 "
      "--seeds 4,5";
  const Result r = run(args);
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "m,n,k,scheme,seed,residual,flags");
  REQUIRE(rows.size() == 1 + 2 * 3 * 3);
  const auto first = fields(rows[1]);
  REQUIRE(first.size() == 7);
  CHECK(first[0] == "16");
  CHECK(first[1] == "8");
  CHECK(first[2] == "64");
  CHECK(first[3] == "fp32_simt");
  CHECK(first[4] == "4");
  CHECK(first[6] == "none");
  const auto mean_row = fields(rows[3]);
  CHECK(mean_row[4] == "mean");
  CHECK(std::stod(mean_row[5]) ==
        doctest::Approx((std::stod(fields(rows[1])[5]) + std::stod(fields(rows[2])[5])) / 2));
  CHECK(fields(rows.back())[2] == "100");
  CHECK(fields(rows.back())[3] == "markidis4");

  SUBCASE("byte determinism across runs and thread counts") {
    CHECK(run(args).out == r.out);
    CHECK(run(args + " --threads 3").out == r.out);
  }
  SUBCASE("--out writes the same bytes to a file") {
    const auto path = std::filesystem::temp_directory_path() / "tclab_cli_test.csv";
    std::filesystem::remove(path);
    const Result to_file = run(args + " --out " + path.string());
    CHECK(to_file.status == 0);
    CHECK(to_file.out.empty());
    std::ifstream in(path, std::ios::binary);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == r.out);
    std::filesystem::remove(path);
  }
}

TEST_CASE("gemm-accuracy on identity inputs has zero residual") {
  const Result r = run("gemm-accuracy --m 16 --n 16 --k 16 --dist identity --seeds 0 "
                       "--scheme fp32_simt,tc_plain_fp16,corrected3_halfhalf,corrected4_rz");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    CHECK(f[5] == "0");
    CHECK(f[6] == "none");
  }
}

TEST_CASE("gemm-accuracy flags band type 4") {
  const Result r =
      run("gemm-accuracy --k 64 --dist type:4 --seeds 1 --scheme corrected3_halfhalf,corrected3_tf32");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(fields(rows[1])[6] == "out_of_range");
  CHECK(fields(rows[2])[6] == "out_of_range");
  CHECK(fields(rows[3])[6] == "none");
}

TEST_CASE("gemm-accuracy usage errors exit nonzero") {
  CHECK(run("gemm-accuracy --scheme fp16_simt --k 16").status != 0);
  CHECK(run("gemm-accuracy --dist normal:0,1 --k 16").status != 0);
  CHECK(run("gemm-accuracy --dist type:7 --k 16").status != 0);
  CHECK(run("gemm-accuracy --k 0").status != 0);
  CHECK(run("gemm-accuracy --k 16 --block-k 0").status != 0);
  CHECK(run("gemm-accuracy --k 16 --acc-bits 99").status != 0);
  CHECK(run("gemm-accuracy --k abc").status != 0);
  CHECK(run("no-such-command").status != 0);
  CHECK(run("").status != 0);
  CHECK(run("gemm-accuracy --k 16 --seeds 0 --out /nonexistent-dir/x.csv").status != 0);
}

TEST_CASE("rounding-ablation") {
  const std::string args = "rounding-ablation --k 32,2048 --seeds 0,1,2";
  const Result r = run(args);
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "m,n,k,seed,residual_rn,residual_rz,residual_fp32");
  REQUIRE(rows.size() == 1 + 2 * 4);
  const auto mean_row = fields(rows.back());
  REQUIRE(mean_row.size() == 7);
  CHECK(mean_row[2] == "2048");
  CHECK(mean_row[3] == "mean");
  CHECK(std::stod(mean_row[5]) > std::stod(mean_row[4]));
  CHECK(run(args + " --threads 2").out == r.out);
  CHECK(run("rounding-ablation --scheme fp32_simt").status != 0);
}

TEST_CASE("ablate-delta") {
  const Result r = run("ablate-delta --k 128 --seeds 0,1");
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  CHECK(rows[0] == "m,n,k,seed,residual_3term,residual_4term,max_ulp_diff");
  REQUIRE(rows.size() == 4);
  const auto worst = fields(rows[3]);
  CHECK(worst[3] == "mean");
  CHECK(std::stoull(worst[6]) ==
        std::max(std::stoull(fields(rows[1])[6]), std::stoull(fields(rows[2])[6])));

  const Result exact = run("ablate-delta --k 16 --dist identity --seeds 0");
  REQUIRE(exact.status == 0);
  CHECK(lines(exact.out)[1] == "16,16,16,0,0,0,0");
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint64_t> bits64;
  for (int i = 0; i < 100000; ++i) {
    double d;
    const std::uint64_t b = bits64(rng);
    std::memcpy(&d, &b, sizeof d);
    if (!std::isfinite(d))
      continue;
    REQUIRE(std::strtod(format_fp64(d).c_str(), nullptr) == d);

    float f;
    const auto b32 = static_cast<std::uint32_t>(b >> 32);
    std::memcpy(&f, &b32, sizeof f);
    if (!std::isfinite(f))
      continue;
    const std::string s = format_fp32(f);
    REQUIRE(std::strtof(s.c_str(), nullptr) == f);
    // Shortest: dropping a digit must not still round-trip.
    if (s.find('e') == std::string::npos && s.size() > 3 && s.back() != '0') {
      std::string shorter = s.substr(0, s.size() - 1);
      if (shorter.back() != '.' && shorter.back() != '-')
        CHECK(std::strtof(shorter.c_str(), nullptr) != f);
    }
  }
  CHECK(format_fp64(0.1) == "0.10000000000000001");
  CHECK(format_fp64(0.0625) == "0.0625");
  CHECK(format_fp32(0.1f) == "0.1");
  CHECK(format_fp32(1.0f) == "1");
  CHECK(parse_rounding("rz") == Rounding::RZ);
  CHECK_THROWS_AS(parse_rounding("RN"), std::invalid_argument);
}
