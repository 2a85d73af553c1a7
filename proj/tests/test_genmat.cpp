// SPDX-License-Identifier: Apache-2.0
#include <tclab/genmat.hpp>

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace tclab;

TEST_CASE("identical specs give bit-identical matrices") {
  for (const Distribution &d : {Distribution{Urand{}}, Distribution{ExpRand{-15, 14}},
                                Distribution{Urand{0.25, 3.0}}}) {
    const MatrixSpec spec{33, 17, d, 12345};
    CHECK(generate(spec) == generate(spec));
    MatrixSpec other = spec;
    other.seed = 12346;
    CHECK_FALSE(generate(spec) == generate(other));
  }
}

TEST_CASE("elements do not depend on matrix shape or fill order") {
  const Matrix<float> big = generate({64, 48, ExpRand{-3, 3}, 9});
  const Matrix<float> small = generate({5, 7, ExpRand{-3, 3}, 9});
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j)
      CHECK(small(i, j) == big(i, j));
}

TEST_CASE("urand stays inside the open interval") {
  const Matrix<float> m = generate({300, 300, Urand{-1.0, 1.0}, 4});
  double sum = 0, sum_sq = 0;
  for (float v : m.values()) {
    REQUIRE(v > -1.0f);
    REQUIRE(v < 1.0f);
    sum += v;
    sum_sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(m.size());
  // Mean 0 with sd 1/sqrt(3n); second moment 1/3 with sd sqrt(4/45 / n).
  CHECK(std::fabs(sum / n) < 4 / std::sqrt(3 * n));
  CHECK(std::fabs(sum_sq / n - 1.0 / 3) < 4 * std::sqrt(4.0 / 45 / n));

  // A two-value interval still never yields an endpoint.
  const float lo = 1.0f, hi = std::nextafter(std::nextafter(1.0f, 2.0f), 2.0f);
  const Matrix<float> narrow = generate({20, 20, Urand{lo, hi}, 1});
  for (float v : narrow.values())
    CHECK(v == std::nextafter(1.0f, 2.0f));
}

TEST_CASE("exprand magnitudes and signs") {
  const Matrix<float> unit = generate({50, 50, ExpRand{0, 0}, 2});
  for (float v : unit.values()) {
    REQUIRE(std::fabs(v) >= 1.0f);
    REQUIRE(std::fabs(v) < 2.0f);
  }
  int negatives = 0;
  const Matrix<float> wide = generate({100, 100, ExpRand{-15, 14}, 3});
  for (float v : wide.values()) {
    REQUIRE(std::fabs(v) > 1e-5f);
    REQUIRE(std::fabs(v) < 1e5f);
    negatives += v < 0;
  }
  CHECK(std::abs(negatives - 5000) < 4 * 50);
  const Matrix<float> tiny = generate({40, 40, ExpRand{-100, -35}, 3});
  for (float v : tiny.values()) {
    REQUIRE(std::ilogb(v) >= -100);
    REQUIRE(std::ilogb(v) <= -35);
  }
}

TEST_CASE("exprand exponent histogram is uniform within 4 sigma") {
  const Matrix<float> m = generate({1000, 1000, ExpRand{-15, 14}, 2024});
  std::map<int, int> hist;
  for (float v : m.values())
    ++hist[std::ilogb(v)];
  REQUIRE(hist.size() == 30);
  CHECK(hist.begin()->first == -15);
  CHECK(hist.rbegin()->first == 14);
  const double n = 1e6, p = 1.0 / 30;
  const double sigma = std::sqrt(n * p * (1 - p));
  for (const auto &[e, count] : hist) {
    CAPTURE(e);
    CHECK(std::fabs(count - n * p) <= 4 * sigma);
  }
}

TEST_CASE("identity distribution") {
  const Matrix<float> m = generate({3, 5, Identity{}, 99});
  CHECK(m == identity<float>(3, 5));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(generate({2, 2, Urand{1.0, 1.0}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate({2, 2, Urand{2.0, -2.0}, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate({2, 2, Urand{1.0, std::nextafter(1.0f, 2.0f)}, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate({2, 2, ExpRand{3, 2}, 0}), std::invalid_argument);
  CHECK_NOTHROW(generate({0, 0, Urand{}, 0}));
}

TEST_CASE("type pairs use the documented exponent bands") {
  auto range = [](const Matrix<float> &m) {
    int lo = 1000, hi = -1000;
    for (float v : m.values()) {
      lo = std::min(lo, std::ilogb(v));
      hi = std::max(hi, std::ilogb(v));
    }
    return std::pair{lo, hi};
  };
  const std::size_t m = 8, n = 6, k = 300;
  const auto within = [&](const Matrix<float> &x, int a, int b) {
    const auto [lo, hi] = range(x);
    CHECK(lo >= a);
    CHECK(hi <= b);
  };
  {
    const auto [a, b] = type_pair(1, m, n, k, 1);
    CHECK(a.rows() == m);
    CHECK(a.cols() == k);
    CHECK(b.rows() == k);
    CHECK(b.cols() == n);
    within(a, -15, 14);
    within(b, -15, 14);
  }
  {
    const auto [a, b] = type_pair(2, m, n, k, 1);
    within(a, -15, 14);
    within(b, -100, -35);
    const auto [ca, cb] = type_pair(2, m, n, k, 1, Type2Variant::caption);
    CHECK(ca == a);
    within(cb, -35, -15);
  }
  {
    const auto [a, b] = type_pair(3, m, n, k, 1);
    within(a, -35, -15);
    within(b, -35, -15);
  }
  {
    const auto [a, b] = type_pair(4, m, n, k, 1);
    within(a, -100, -35);
    within(b, -15, 14);
  }
  CHECK_THROWS_AS(type_pair(0, m, n, k, 1), std::invalid_argument);
  CHECK_THROWS_AS(type_pair(5, m, n, k, 1), std::invalid_argument);
  CHECK(type_pair(3, m, n, k, 7) == type_pair(3, m, n, k, 7));
}

TEST_CASE("make_inputs") {
  const auto [a, b] = make_inputs(Distribution{Urand{}}, 4, 5, 6, 11);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 6);
  CHECK(b.rows() == 6);
  CHECK(b.cols() == 5);
  CHECK_FALSE(a.values()[0] == b.values()[0]);
  CHECK(make_inputs(BandType{4}, 4, 5, 6, 11) == type_pair(4, 4, 5, 6, 11));
  const auto [ia, ib] = make_inputs(Distribution{Identity{}}, 3, 3, 3, 0);
  CHECK(ia == identity<float>(3, 3));
  CHECK(ib == identity<float>(3, 3));
}

TEST_CASE("parse_input_spec") {
  const InputSpec u = parse_input_spec("urand:-1,1");
  REQUIRE(std::holds_alternative<Distribution>(u));
  const auto &ud = std::get<Urand>(std::get<Distribution>(u));
  CHECK(ud.lo == -1.0);
  CHECK(ud.hi == 1.0);
  CHECK(to_string(u) == "urand:-1,1");

  const InputSpec e = parse_input_spec("exprand:-15,14");
  CHECK(std::get<ExpRand>(std::get<Distribution>(e)).a == -15);
  CHECK(to_string(e) == "exprand:-15,14");

  const InputSpec t = parse_input_spec("type:2");
  CHECK(std::get<BandType>(t).id == 2);
  CHECK(std::get<BandType>(t).variant == Type2Variant::combination_list);
  CHECK(to_string(t) == "type:2");
  CHECK(to_string(BandType{2, Type2Variant::caption}) == "type:2(caption)");

  CHECK(to_string(parse_input_spec("identity")) == "identity");
  CHECK(to_string(parse_input_spec("urand:0.5,2.25")) == "urand:0.5,2.25");

  for (const char *bad : {"", "urand", "urand:1", "urand:1,x", "urand:2,1", "exprand:3,1",
                          "exprand:1.5,2", "type:0", "type:5", "type:x", "normal:0,1",
                          "identity:1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_input_spec(bad), std::invalid_argument);
  }
}

TEST_CASE("derive_seed gives distinct streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t stream = 0; stream < 20; ++stream)
      seen.insert(derive_seed(s, stream));
  CHECK(seen.size() == 400);
  CHECK(derive_seed(5, 1) == derive_seed(5, 1));
}
