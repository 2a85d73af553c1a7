// SPDX-License-Identifier: Apache-2.0
#include <tclab/genmat.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tclab {
namespace {

// splitmix64 finalizer; used as a keyed hash so each draw is addressable.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t draw(std::uint64_t seed, std::size_t row, std::size_t col, std::uint64_t index) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ row);
  h = mix(h ^ col);
  return mix(h ^ index);
}

// Uniform integer in [0, range) by multiply-shift.
std::uint64_t below(std::uint64_t x, std::uint64_t range) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * range) >> 64);
}

float urand_value(const Urand &d, std::uint64_t x) {
  const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1p-53; // (0, 1)
  float f = static_cast<float>(d.lo + (d.hi - d.lo) * u);
  const float lo = static_cast<float>(d.lo);
  const float hi = static_cast<float>(d.hi);
  if (!(f > d.lo))
    f = std::nextafter(lo, std::numeric_limits<float>::infinity());
  if (!(f < d.hi))
    f = std::nextafter(hi, -std::numeric_limits<float>::infinity());
  return f;
}

float exprand_value(const ExpRand &d, std::uint64_t seed, std::size_t i, std::size_t j) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(d.b) - d.a + 1);
  const int e = d.a + static_cast<int>(below(draw(seed, i, j, 0), span));
  const std::uint64_t frac = draw(seed, i, j, 1) >> (64 - 23);
  const bool negative = (draw(seed, i, j, 2) >> 63) == 0;
  const double m = 1.0 + std::ldexp(static_cast<double>(frac), -23);
  const double v = std::ldexp(negative ? -m : m, e);
  return static_cast<float>(v);
}

Matrix<float> band(std::size_t rows, std::size_t cols, int a, int b, std::uint64_t seed) {
  return generate(MatrixSpec{rows, cols, ExpRand{a, b}, seed});
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ull));
}

void MatrixSpec::validate() const {
  if (const auto *u = std::get_if<Urand>(&dist)) {
    if (!(u->lo < u->hi) || !std::isfinite(u->lo) || !std::isfinite(u->hi))
      throw std::invalid_argument("urand: require finite lo < hi");
    if (std::nextafter(static_cast<float>(u->lo), std::numeric_limits<float>::infinity()) >=
        static_cast<float>(u->hi))
      throw std::invalid_argument("urand: interval contains no interior FP32 value");
  } else if (const auto *e = std::get_if<ExpRand>(&dist)) {
    if (e->a > e->b)
      throw std::invalid_argument("exprand: require a <= b");
  }
}

Matrix<float> generate(const MatrixSpec &spec) {
  spec.validate();
  if (std::holds_alternative<Identity>(spec.dist))
    return identity<float>(spec.rows, spec.cols);

  Matrix<float> m(spec.rows, spec.cols);
  for (std::size_t i = 0; i < spec.rows; ++i) {
    for (std::size_t j = 0; j < spec.cols; ++j) {
      if (const auto *u = std::get_if<Urand>(&spec.dist))
        m(i, j) = urand_value(*u, draw(spec.seed, i, j, 0));
      else
        m(i, j) = exprand_value(std::get<ExpRand>(spec.dist), spec.seed, i, j);
    }
  }
  return m;
}

std::pair<Matrix<float>, Matrix<float>> type_pair(int type_id, std::size_t m, std::size_t n,
                                                  std::size_t k, std::uint64_t seed,
                                                  Type2Variant variant) {
  const std::uint64_t sa = derive_seed(seed, 0);
  const std::uint64_t sb = derive_seed(seed, 1);
  switch (type_id) {
  case 1:
    return {band(m, k, -15, 14, sa), band(k, n, -15, 14, sb)};
  case 2:
    if (variant == Type2Variant::caption)
      return {band(m, k, -15, 14, sa), band(k, n, -35, -15, sb)};
    return {band(m, k, -15, 14, sa), band(k, n, -100, -35, sb)};
  case 3:
    return {band(m, k, -35, -15, sa), band(k, n, -35, -15, sb)};
  case 4:
    return {band(m, k, -100, -35, sa), band(k, n, -15, 14, sb)};
  default:
    throw std::invalid_argument("type_pair: type_id must be in 1..4");
  }
}

std::pair<Matrix<float>, Matrix<float>> make_inputs(const InputSpec &spec, std::size_t m,
                                                    std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
  if (const auto *t = std::get_if<BandType>(&spec))
    return type_pair(t->id, m, n, k, seed, t->variant);
  const auto &dist = std::get<Distribution>(spec);
  return {generate(MatrixSpec{m, k, dist, derive_seed(seed, 0)}),
          generate(MatrixSpec{k, n, dist, derive_seed(seed, 1)})};
}

namespace {

std::pair<std::string, std::string> split_pair(const std::string &args, const std::string &text) {
  const auto comma = args.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("bad input spec '" + text + "': expected two comma-separated values");
  return {args.substr(0, comma), args.substr(comma + 1)};
}

template <class T> T parse_number(const std::string &s, const std::string &text) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (!in || !in.eof())
    throw std::invalid_argument("bad number '" + s + "' in input spec '" + text + "'");
  return v;
}

} // namespace

InputSpec parse_input_spec(const std::string &text) {
  if (text == "identity")
    return Distribution{Identity{}};
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("bad input spec '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  if (kind == "urand") {
    const auto [lo, hi] = split_pair(args, text);
    const Urand u{parse_number<double>(lo, text), parse_number<double>(hi, text)};
    MatrixSpec{1, 1, u, 0}.validate();
    return Distribution{u};
  }
  if (kind == "exprand") {
    const auto [a, b] = split_pair(args, text);
    const ExpRand e{parse_number<int>(a, text), parse_number<int>(b, text)};
    MatrixSpec{1, 1, e, 0}.validate();
    return Distribution{e};
  }
  if (kind == "type") {
    const int id = parse_number<int>(args, text);
    if (id < 1 || id > 4)
      throw std::invalid_argument("bad input spec '" + text + "': type must be 1..4");
    return BandType{id, Type2Variant::combination_list};
  }
  throw std::invalid_argument("bad input spec '" + text + "'");
}

std::string to_string(const InputSpec &spec) {
  std::ostringstream out;
  out.precision(17);
  if (const auto *t = std::get_if<BandType>(&spec)) {
    out << "type:" << t->id;
    if (t->id == 2 && t->variant == Type2Variant::caption)
      out << "(caption)";
    return out.str();
  }
  const auto &dist = std::get<Distribution>(spec);
  if (const auto *u = std::get_if<Urand>(&dist))
    out << "urand:" << u->lo << ',' << u->hi;
  else if (const auto *e = std::get_if<ExpRand>(&dist))
    out << "exprand:" << e->a << ',' << e->b;
  else
    out << "identity";
  return out.str();
}

} // namespace tclab
