#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "hardylab/grammar.hpp"
#include "hardylab/means.hpp"

using namespace hardylab;

namespace {

double log_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
  return std::exp(u(rng));
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t lo = 2, std::size_t hi = 6) {
  std::uniform_int_distribution<std::size_t> len(lo, hi);
  std::vector<double> x(len(rng));
  for (auto& v : x) v = log_uniform(rng);
  return x;
}

// Position-level reference: expand integer weights into explicit positions,
// enumerate pairs literally, feed the outer mean a flat unit-weight sample.
double brute_mix(const MeanExpr& outer, const MeanExpr& inner, PairKind kind,
                 const WeightedSample& s) {
  std::vector<double> positions;
  for (const auto& e : s.entries())
    for (long k = 0; k < static_cast<long>(e.weight); ++k) positions.push_back(e.value);
  std::vector<double> inner_values;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (kind == PairKind::Circ && j <= i) continue;
      double xy[2] = {positions[i], positions[j]};
      inner_values.push_back(eval_mean(inner, xy));
    }
  }
  return eval_mean(outer, inner_values);
}

std::map<std::pair<double, double>, double> pair_table(const PairExpansion& pe) {
  std::map<std::pair<double, double>, double> out;
  for (const auto& p : pe.pairs) out[{p.first, p.second}] += p.weight;
  return out;
}

}  // namespace

TEST_CASE("eval_power matches hand values") {
  CHECK(eval_power(0.0, {{1, 1}, {4, 1}}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eval_power(1.0, {{2, 1}, {4, 1}}) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eval_power(0.0, {{8, 1}, {1, 2}}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eval_power(-1.0, {{1, 1}, {1.0 / 3.0, 1}}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_power(2.0, {{1, 1}, {7, 1}}) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("eval_power respects min/max bounds and singletons") {
  WeightedSample s{{0.3, 2.5}, {17.0, 0.25}, {1.0, 1}};
  for (double p : {-40.0, -3.0, -1.0, 0.0, 0.5, 1.0, 3.0, 40.0}) {
    double v = eval_power(p, s);
    CHECK(v >= 0.3);
    CHECK(v <= 17.0);
  }
  CHECK(eval_power(123.0, {{3.7, 9.0}}) == 3.7);
}

TEST_CASE("eval_power log and direct accumulation agree on benign input") {
  std::mt19937_64 rng(2024);
  EvalOptions direct;
  direct.log_domain = false;
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_vector(rng);
    auto s = WeightedSample::from_values(x);
    std::uniform_real_distribution<double> pe(-6.0, 6.0);
    double p = pe(rng);
    double a = eval_power(p, s);
    double b = eval_power(p, s, direct);
    CHECK(std::abs(a - b) <= 1e-11 * std::max(a, b));
  }
}

TEST_CASE("eval_power overflow reports the offending exponent") {
  EvalOptions direct;
  direct.log_domain = false;
  try {
    eval_power(400.0, {{10.0, 1}, {1.0, 1}}, direct);
    FAIL("expected EvalError");
  } catch (const EvalError& err) {
    CHECK(err.exponent() == 400.0);
  }
}

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(WeightedSample{}, DomainError);
  CHECK_THROWS_AS(WeightedSample({{0.0, 1}}), DomainError);
  CHECK_THROWS_AS(WeightedSample({{-2.0, 1}}), DomainError);
  CHECK_THROWS_AS(WeightedSample({{1.0, 0.0}}), DomainError);
  CHECK_THROWS_AS(WeightedSample({{1.0, -1.0}}), DomainError);
}

TEST_CASE("merged sums weights of equal values") {
  WeightedSample s{{1, 1}, {4, 1}, {1, 2}};
  auto m = s.merged();
  REQUIRE(m.size() == 2);
  CHECK(m.entries()[0].value == 1.0);
  CHECK(m.entries()[0].weight == 3.0);
  CHECK(m.entries()[1].value == 4.0);
}

TEST_CASE("expand_pairs square table") {
  auto pe = expand_pairs(PairKind::Square, {{1, 1}, {4, 1}});
  CHECK(!pe.unary);
  auto table = pair_table(pe);
  REQUIRE(table.size() == 4);
  CHECK(table[{1, 1}] == 1.0);
  CHECK(table[{1, 4}] == 1.0);
  CHECK(table[{4, 1}] == 1.0);
  CHECK(table[{4, 4}] == 1.0);
}

TEST_CASE("expand_pairs circ table with multiplicities") {
  auto pe = expand_pairs(PairKind::Circ, {{1, 2}, {4, 2}});
  CHECK(!pe.unary);
  auto table = pair_table(pe);
  REQUIRE(table.size() == 3);
  CHECK(table[{1, 1}] == 1.0);
  CHECK(table[{1, 4}] == 4.0);
  CHECK(table[{4, 4}] == 1.0);
}

TEST_CASE("expand_pairs circ unary signal and rejections") {
  auto pe = expand_pairs(PairKind::Circ, {{5, 1}});
  CHECK(pe.unary);
  CHECK(pe.pairs.empty());
  CHECK_THROWS_AS(expand_pairs(PairKind::Circ, WeightedSample{{2, 1.5}}), DomainError);
  CHECK_THROWS_AS(expand_pairs(PairKind::Circ, WeightedSample{{2, 1}, {3, 0.5}}), DomainError);
}

TEST_CASE("eval_mean frozen mix values") {
  auto circ10 = MeanExpr::circ(MeanExpr::power(1), MeanExpr::power(0));
  auto sq01 = MeanExpr::square(MeanExpr::power(0), MeanExpr::power(1));

  CHECK(eval_mean(circ10, WeightedSample{{1, 1}, {4, 1}}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eval_mean(circ10, WeightedSample{{1, 2}, {4, 2}}) ==
        doctest::Approx(13.0 / 6.0).epsilon(1e-14));
  CHECK(eval_mean(sq01, WeightedSample{{1, 1}, {4, 1}}) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  double x1[1] = {5.0};
  CHECK(eval_mean(circ10, x1) == 5.0);
}

TEST_CASE("eval_repeated matches hand-computed repetitions") {
  double x[2] = {1, 4};
  CHECK(eval_repeated(MeanExpr::power(0), x, 7) == doctest::Approx(2.0).epsilon(1e-14));
  auto circ10 = MeanExpr::circ(MeanExpr::power(1), MeanExpr::power(0));
  CHECK(eval_repeated(circ10, x, 2) == doctest::Approx(13.0 / 6.0).epsilon(1e-14));
  auto sq01 = MeanExpr::square(MeanExpr::power(0), MeanExpr::power(1));
  CHECK(eval_repeated(sq01, x, 3) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
  CHECK_THROWS_AS(eval_repeated(circ10, x, 0), DomainError);
}

TEST_CASE("mixes agree with the position-level reference") {
  std::mt19937_64 rng(31337);
  std::vector<MeanExpr> leaves = {MeanExpr::power(-1), MeanExpr::power(0), MeanExpr::power(0.5),
                                  MeanExpr::power(1), MeanExpr::power(2)};
  std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
  std::uniform_int_distribution<int> weight(1, 3);
  for (int trial = 0; trial < 120; ++trial) {
    auto x = random_vector(rng, 1, 5);
    std::vector<SampleEntry> entries;
    for (double v : x) entries.push_back({v, static_cast<double>(weight(rng))});
    WeightedSample s(entries);
    const auto& outer = leaves[pick(rng)];
    const auto& inner = leaves[pick(rng)];

    double sq = eval_mean(MeanExpr::square(outer, inner), s);
    CHECK(std::abs(sq - brute_mix(outer, inner, PairKind::Square, s)) <= 1e-11 * sq);

    double total = s.total_weight();
    if (total >= 2) {
      double ci = eval_mean(MeanExpr::circ(outer, inner), s);
      CHECK(std::abs(ci - brute_mix(outer, inner, PairKind::Circ, s)) <= 1e-11 * ci);
    }
  }
}

TEST_CASE("permutation and merge invariance") {
  std::mt19937_64 rng(777);
  auto sq = MeanExpr::square(MeanExpr::power(0.5), MeanExpr::power(-1));
  auto circ = MeanExpr::circ(MeanExpr::power(1), MeanExpr::power(0));
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_vector(rng, 2, 6);
    std::vector<SampleEntry> entries;
    for (double v : x) entries.push_back({v, 2.0});
    entries.push_back({x[0], 1.0});  // duplicate value in a separate entry
    WeightedSample s(entries);

    auto shuffled = entries;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    WeightedSample sp(shuffled);

    for (const auto& e : {sq, circ}) {
      double a = eval_mean(e, s);
      CHECK(std::abs(a - eval_mean(e, sp)) <= 1e-12 * a);
      CHECK(std::abs(a - eval_mean(e, s.merged())) <= 1e-12 * a);
    }
  }
}

TEST_CASE("weight scaling invariance for power and square") {
  std::mt19937_64 rng(99);
  auto sq = MeanExpr::square(MeanExpr::power(0), MeanExpr::power(1));
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_vector(rng);
    std::uniform_real_distribution<double> wd(0.1, 5.0);
    std::vector<SampleEntry> entries, scaled;
    double k = wd(rng);
    for (double v : x) {
      double w = wd(rng);
      entries.push_back({v, w});
      scaled.push_back({v, k * w});
    }
    WeightedSample s(entries), sk(scaled);
    for (double p : {-1.0, 0.0, 0.5, 1.0}) {
      double a = eval_power(p, s);
      CHECK(std::abs(a - eval_power(p, sk)) <= 1e-12 * a);
    }
    double a = eval_mean(sq, s);
    CHECK(std::abs(a - eval_mean(sq, sk)) <= 1e-12 * a);
  }
}

TEST_CASE("power mean monotone in p and bounded by min/max") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_vector(rng);
    auto s = WeightedSample::from_values(x);
    std::uniform_real_distribution<double> pe(-5.0, 5.0);
    double p = pe(rng), q = pe(rng);
    if (p > q) std::swap(p, q);
    double mp = eval_power(p, s), mq = eval_power(q, s);
    CHECK(mp <= mq * (1 + 1e-12));
    CHECK(mp >= s.min_value());
    CHECK(mq <= s.max_value());
  }
}

TEST_CASE("homogenize_estimate") {
  double x[2] = {1, 4};
  double grid[4] = {1.0, 0.5, 0.25, 0.125};

  auto g = homogenize_estimate(MeanExpr::power(0), x, grid);
  CHECK(g.lower == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g.upper == doctest::Approx(2.0).epsilon(1e-14));

  auto sq01 = MeanExpr::square(MeanExpr::power(0), MeanExpr::power(1));
  auto h = homogenize_estimate(sq01, x, grid);
  CHECK(h.lower == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));
  CHECK(h.upper == doctest::Approx(std::sqrt(5.0)).epsilon(1e-13));

  double c[3] = {3, 3, 3};
  auto hc = homogenize_estimate(MeanExpr::circ(MeanExpr::power(0.5), MeanExpr::power(2)), c, grid);
  CHECK(hc.lower == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(hc.upper == doctest::Approx(3.0).epsilon(1e-13));

  CHECK_THROWS_AS(homogenize_estimate(MeanExpr::power(0), x, std::span<const double>{}),
                  DomainError);
  double bad[1] = {2.0};
  CHECK_THROWS_AS(homogenize_estimate(MeanExpr::power(0), x, bad), DomainError);
}

TEST_CASE("grammar round trip") {
  for (const char* text : {"P[0]", "P[1]", "P[-1]", "P[0.5]", "sq(P[0],P[1])",
                           "circ(P[1],P[0])", "circ(sq(P[0],P[1]),P[-0.25])"}) {
    auto e = parse_mean(text);
    CHECK(to_string(e) == text);
    CHECK(to_string(parse_mean(to_string(e))) == to_string(e));
  }
}

TEST_CASE("grammar accepts fractions and whitespace") {
  auto e = parse_mean(" sq( P[ 1/2 ] , P[ -1 ] ) ");
  auto mix = as_power_mix(e);
  REQUIRE(mix.has_value());
  CHECK(mix->kind == PairKind::Square);
  CHECK(mix->p == 0.5);
  CHECK(mix->q == -1.0);
  CHECK(parse_mean("P[1/3]").exponent() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(parse_mean("P[1e-2]").exponent() == 0.01);
}

TEST_CASE("grammar errors carry positions") {
  try {
    parse_mean("P[0");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.position() == 3);
  }
  try {
    parse_mean("Q[0]");
    FAIL("expected ParseError");
  } catch (const ParseError& err) {
    CHECK(err.position() == 0);
  }
  CHECK_THROWS_AS(parse_mean("P[abc]"), ParseError);
  CHECK_THROWS_AS(parse_mean("P[1/0]"), ParseError);
  CHECK_THROWS_AS(parse_mean("P[inf]"), ParseError);
  CHECK_THROWS_AS(parse_mean("P[0]x"), ParseError);
  CHECK_THROWS_AS(parse_mean("sq(P[0])"), ParseError);
  CHECK_THROWS_AS(parse_mean(""), ParseError);
}

TEST_CASE("as_power and as_power_mix classify shapes") {
  CHECK(as_power(parse_mean("P[0.5]")) == 0.5);
  CHECK(!as_power(parse_mean("sq(P[0],P[1])")).has_value());
  auto mix = as_power_mix(parse_mean("circ(P[1],P[0])"));
  REQUIRE(mix.has_value());
  CHECK(mix->kind == PairKind::Circ);
  CHECK(mix->p == 1.0);
  CHECK(mix->q == 0.0);
  CHECK(!as_power_mix(parse_mean("sq(sq(P[0],P[1]),P[1])")).has_value());
  CHECK(parse_mean("circ(sq(P[0],P[1]),P[1])").contains_circ());
  CHECK(parse_mean("sq(circ(P[0],P[1]),P[1])").contains_circ());
  CHECK(!parse_mean("sq(P[0],P[1])").contains_circ());
}
