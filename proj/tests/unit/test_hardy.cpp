#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "hardylab/errors.hpp"
#include "hardylab/grammar.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/means.hpp"
#include "hardylab/numerics.hpp"
#include "hardylab/rho.hpp"

using namespace hardylab;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(len);
  for (auto& v : x) v = std::exp(std::log(1e-3) + unit(rng) * std::log(1e6));
  return x;
}

std::vector<double> harmonic_vector(long n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
  return x;
}

}  // namespace

TEST_CASE("gamma spot values") {
  // qualified: the libc gamma() otherwise shadows the library one here
  CHECK(hardylab::gamma(0.0) == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK(hardylab::gamma(-1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hardylab::gamma(0.5) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(std::isinf(hardylab::gamma(1.0)));
  CHECK(std::isinf(hardylab::gamma(1.5)));
  CHECK(hardylab::gamma(-2.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("classical upper bounds") {
  CHECK(kaluza_szego_bound(0.0, 1) == doctest::Approx(1.5819767068693265).epsilon(1e-12));
  CHECK(kaluza_szego_bound(0.0, 2) == doctest::Approx(2.0951076766184632).epsilon(1e-12));
  CHECK(hlp_bound(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hlp_bound(2) == doctest::Approx(2.25).epsilon(1e-15));
  for (int n = 1; n < 40; ++n) CHECK(hlp_bound(n) < hlp_bound(n + 1));
  CHECK_THROWS_AS(kaluza_szego_bound(1.0, 3), DomainError);
  CHECK_THROWS_AS(kaluza_szego_bound(-0.5, 3), DomainError);
  CHECK_THROWS_AS(kaluza_szego_bound(0.5, 0), DomainError);
  CHECK_THROWS_AS(hlp_bound(0), DomainError);
}

TEST_CASE("prefix means match whole-prefix evaluation for every shape class") {
  std::vector<MeanExpr> shapes = {
      parse_mean("P[0]"),
      parse_mean("P[1]"),
      parse_mean("P[-2]"),
      parse_mean("P[0.5]"),
      parse_mean("sq(P[0.5],P[-1])"),
      parse_mean("sq(P[0],P[1])"),
      parse_mean("sq(P[1],P[0])"),
      parse_mean("sq(P[-1],P[0])"),
      parse_mean("sq(P[0],P[-1])"),
      parse_mean("circ(P[0.5],P[-1])"),
      parse_mean("circ(P[0],P[-1])"),
      parse_mean("circ(P[1],P[0])"),
      parse_mean("circ(P[1],P[1])"),
      parse_mean("sq(P[1],sq(P[0],P[1]))"),     // power outer, composite inner
      parse_mean("circ(P[0],sq(P[0],P[-1]))"),  // log outer, composite inner
      parse_mean("sq(sq(P[0],P[1]),P[1])"),     // composite outer fallback
  };
  std::mt19937_64 rng(20260816u);
  for (const auto& e : shapes) {
    for (int trial = 0; trial < 6; ++trial) {
      auto x = random_vector(rng, 1 + trial * 7);
      auto m = prefix_means(e, x);
      REQUIRE(m.size() == x.size());
      for (std::size_t i = 0; i < x.size(); i += 1 + i / 4) {
        double direct = eval_mean(e, std::span<const double>(x).subspan(0, i + 1));
        CHECK(relative_diff(m[i], direct) < 1e-11);
      }
    }
  }
}

TEST_CASE("prefix means validate input") {
  MeanExpr e = parse_mean("P[1]");
  CHECK_THROWS_AS(prefix_means(e, std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(prefix_means(e, std::vector<double>{1.0, -2.0}), DomainError);
  CHECK_THROWS_AS(prefix_means(e, std::vector<double>{1.0, 0.0}), DomainError);
}

TEST_CASE("mixes of a mean with itself collapse on the geometric diagonal") {
  auto x = harmonic_vector(200);
  auto base = prefix_means(parse_mean("P[0]"), x);
  for (const char* expr : {"sq(P[0],P[0])", "circ(P[0],P[0])"}) {
    auto m = prefix_means(parse_mean(expr), x);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(relative_diff(m[i], base[i]) < 1e-12);
  }
}

TEST_CASE("harmonic lower bound recovers e for the geometric mean") {
  auto out = harmonic_lower_bound(parse_mean("P[0]"), 10000);
  CHECK(out.n_used == 10000);
  CHECK_FALSE(out.diverging);
  REQUIRE(out.accelerated.has_value());
  CHECK(std::abs(out.estimate - std::numbers::e) < 1e-4);
  CHECK(out.raw_tail_min < std::numbers::e);
  CHECK(std::numbers::e - out.raw_tail_min < 2e-3);
  REQUIRE(out.tail.size() > 10);
  CHECK(out.tail.front().first >= 9000);
  CHECK(out.tail.back().first == 10000);

  auto raw_only = harmonic_lower_bound(parse_mean("P[0]"), 10000, false);
  CHECK(raw_only.estimate == raw_only.raw_tail_min);
}

TEST_CASE("harmonic lower bound flags the arithmetic mean as diverging") {
  auto out = harmonic_lower_bound(parse_mean("P[1]"), 10000);
  CHECK(out.diverging);
  CHECK(out.estimate == out.raw_tail_min);
  // a_n is the n-th harmonic number here, far above any finite plateau
  CHECK(out.estimate > 9.0);
}

TEST_CASE("harmonic lower bound approaches the mixed-mean constants") {
  struct Row {
    const char* expr;
    double p, q;
  };
  const Row rows[] = {
      {"sq(P[0],P[-1])", 0.0, -1.0},
      {"sq(P[-1],P[0])", -1.0, 0.0},
      {"circ(P[0.5],P[-1])", 0.5, -1.0},
  };
  for (const auto& row : rows) {
    double target = rho_closed(row.p, row.q).value_or(rho(row.p, row.q, 1e-8).value);
    auto out = harmonic_lower_bound(parse_mean(row.expr), 4000);
    CHECK_FALSE(out.diverging);
    CHECK(std::abs(out.estimate - target) < 5e-3);
    // the sequence stays below its limit on the way up
    CHECK(out.raw_tail_min < target + 1e-9);
  }
}

TEST_CASE("harmonic lower bound caps the composite-outer grid") {
  auto out = harmonic_lower_bound(parse_mean("sq(sq(P[0],P[1]),P[1])"), 10000);
  CHECK(out.n_used == 48);
  CHECK(out.estimate > 1.0);
  CHECK_THROWS_AS(harmonic_lower_bound(parse_mean("P[0]"), 9), DomainError);
}

TEST_CASE("two-term geometric Hardy bound hits the closed-form optimum") {
  auto r = hardy_n_lower(parse_mean("P[0]"), 2);
  CHECK(r.value > 1.20710);
  CHECK(r.value < 1.20712);
  REQUIRE(r.maximizer.size() == 2);
  CHECK(std::abs(r.maximizer[0] - 0.8535533905932737) < 1e-5);
  CHECK(std::abs(r.maximizer[1] - 0.1464466094067263) < 1e-5);
  CHECK_FALSE(r.boundary_suspected);
  CHECK(r.discarded_restarts == 0);
}

TEST_CASE("one-term bound is exact and the dimension cap is enforced") {
  auto r = hardy_n_lower(parse_mean("sq(P[0],P[-1])"), 1);
  CHECK(r.value == 1.0);
  REQUIRE(r.maximizer.size() == 1);
  CHECK(r.maximizer[0] == 1.0);
  CHECK_THROWS_AS(hardy_n_lower(parse_mean("P[0]"), 13), DomainError);
  CHECK_THROWS_AS(hardy_n_lower(parse_mean("P[0]"), 0), DomainError);
}

TEST_CASE("arithmetic-mean supremum sits on the simplex boundary") {
  auto r = hardy_n_lower(parse_mean("P[1]"), 2);
  CHECK(r.value > 1.4999);
  CHECK(r.value <= 1.5 + 1e-12);
  CHECK(r.boundary_suspected);
}

TEST_CASE("n-term lower bounds are deterministic and nondecreasing") {
  MeanExpr e = parse_mean("P[0]");
  OptimizerConfig cfg;
  cfg.seed = 7;
  double prev = 0.0;
  for (int n = 1; n <= 6; ++n) {
    auto r = hardy_n_lower(e, n, cfg);
    CHECK(r.value >= prev - 1e-9);
    CHECK(r.value <= superinvariant_upper_bound(e, n) + 1e-6);
    CHECK(r.value < std::numbers::e);
    prev = r.value;
  }
  auto a = hardy_n_lower(e, 4, cfg);
  auto b = hardy_n_lower(e, 4, cfg);
  CHECK(a.value == b.value);
  CHECK(a.maximizer == b.maximizer);
}

TEST_CASE("warm starts are accepted and do not hurt") {
  MeanExpr e = parse_mean("sq(P[0],P[-1])");
  OptimizerConfig cfg;
  cfg.restarts = 8;
  auto cold = hardy_n_lower(e, 3, cfg);
  std::vector<double> warm = cold.maximizer;
  auto warmed = hardy_n_lower(e, 3, cfg, warm);
  CHECK(warmed.value >= cold.value - 1e-12);
}

TEST_CASE("superinvariant upper bound closed values") {
  MeanExpr g = parse_mean("P[0]");
  CHECK(std::abs(superinvariant_upper_bound(g, 2) - std::numbers::sqrt2) < 1e-12);
  CHECK(std::abs(superinvariant_upper_bound(g, 3) - 3.0 / std::cbrt(6.0)) < 1e-12);
  CHECK(superinvariant_upper_bound(g, 1) == doctest::Approx(1.0).epsilon(1e-15));
  // the bound increases toward e for the geometric mean
  double prev = 0.0;
  for (int n = 1; n <= 30; ++n) {
    double b = superinvariant_upper_bound(g, n);
    CHECK(b > prev);
    CHECK(b < std::numbers::e);
    prev = b;
  }
  CHECK_THROWS_AS(superinvariant_upper_bound(g, 0), DomainError);
}

TEST_CASE("superinvariant bound survives large circ multiplicities") {
  MeanExpr e = parse_mean("circ(P[1],P[0])");
  double prev = 0.0;
  for (int n : {2, 5, 12, 21, 22, 30}) {
    double b = superinvariant_upper_bound(e, n);
    CHECK(std::isfinite(b));
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("truncated Hardy margins are nonnegative at the true constant") {
  MeanExpr g = parse_mean("P[0]");
  std::vector<double> geo(50);
  double v = 1.0;
  for (auto& xi : geo) {
    xi = v;
    v *= 0.5;
  }
  auto rep = truncated_hardy_check(g, geo, std::numbers::e);
  CHECK(rep.margin > 0.0);
  CHECK(rep.sum_values == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(rep.prefix_partial.size() == 50);
  CHECK(rep.prefix_partial.front() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rep.prefix_partial.back() == doctest::Approx(rep.sum_prefix_means).epsilon(1e-15));
  for (std::size_t i = 1; i < rep.prefix_partial.size(); ++i)
    CHECK(rep.prefix_partial[i] >= rep.prefix_partial[i - 1]);

  // an undersized candidate constant must go negative on the same data
  auto bad = truncated_hardy_check(g, geo, 1.0);
  CHECK(bad.margin < 0.0);
}

TEST_CASE("seeded summable samples are reproducible and well formed") {
  auto a = seeded_l1_samples(99, 10);
  auto b = seeded_l1_samples(99, 10);
  auto c = seeded_l1_samples(100, 10);
  REQUIRE(a.size() == 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& x : a) {
    CHECK(x.size() >= 40);
    CHECK(x.size() <= 120);
    for (double xi : x) CHECK(xi > 0.0);
    // decaying families: worst case is 40 terms of k^-1.5, a factor ~4e-3
    CHECK(x.back() < 0.05 * x.front());
  }
}

TEST_CASE("bracket report for the geometric mean") {
  BracketConfig cfg;
  cfg.hn_max = 4;
  cfg.harmonic_n_max = 2000;
  auto br = hardy_bracket(parse_mean("P[0]"), cfg);
  REQUIRE(br.gamma_reference.has_value());
  CHECK(*br.gamma_reference == doctest::Approx(std::numbers::e).epsilon(1e-15));
  CHECK_FALSE(br.rho_reference.has_value());
  REQUIRE(br.lower_hn.size() == 4);
  REQUIRE(br.upper_theorem.size() == 4);
  for (std::size_t i = 0; i < br.lower_hn.size(); ++i) {
    CHECK(br.lower_hn[i].n == static_cast<int>(i) + 1);
    CHECK(br.lower_hn[i].lower <= br.upper_theorem[i].second + 1e-6);
    if (i > 0) CHECK(br.lower_hn[i].lower >= br.lower_hn[i - 1].lower - 1e-9);
  }
  CHECK(std::abs(br.harmonic.estimate - std::numbers::e) < 1e-3);
  for (const auto& f : br.flags) CHECK(f != "diverging");
}

TEST_CASE("bracket report flags the arithmetic mean") {
  BracketConfig cfg;
  cfg.hn_max = 2;
  cfg.harmonic_n_max = 1000;
  auto br = hardy_bracket(parse_mean("P[1]"), cfg);
  REQUIRE(br.gamma_reference.has_value());
  CHECK(std::isinf(*br.gamma_reference));
  bool infinite = false, diverging = false, boundary = false;
  for (const auto& f : br.flags) {
    infinite = infinite || f == "reference-infinite";
    diverging = diverging || f == "diverging";
    boundary = boundary || f == "supremum suspected on boundary";
  }
  CHECK(infinite);
  CHECK(diverging);
  CHECK(boundary);
}

TEST_CASE("bracket report carries mixed-mean references") {
  BracketConfig cfg;
  cfg.hn_max = 3;
  cfg.harmonic_n_max = 1000;
  auto sq = hardy_bracket(parse_mean("sq(P[0],P[-1])"), cfg);
  REQUIRE(sq.rho_reference.has_value());
  CHECK(*sq.rho_reference ==
        doctest::Approx(std::exp(1.5) / 2.0).epsilon(1e-12));
  CHECK_FALSE(sq.gamma_reference.has_value());
  CHECK_FALSE(sq.upper_theorem.empty());

  auto circ = hardy_bracket(parse_mean("circ(P[1],P[0])"), cfg);
  REQUIRE(circ.rho_reference.has_value());
  CHECK(*circ.rho_reference == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_FALSE(circ.upper_theorem.empty());

  // circ with p <= q falls outside the theorem gate
  auto flat = hardy_bracket(parse_mean("circ(P[0],P[0])"), cfg);
  CHECK(flat.upper_theorem.empty());

  // square mix at the (1,1) corner has an infinite reference constant
  auto corner = hardy_bracket(parse_mean("sq(P[1],P[1])"), cfg);
  CHECK_FALSE(corner.rho_reference.has_value());
  bool infinite = false;
  for (const auto& f : corner.flags) infinite = infinite || f == "reference-infinite";
  CHECK(infinite);
}

TEST_CASE("bracket clamps the n range to the dimension cap") {
  BracketConfig cfg;
  cfg.hn_max = 6;
  cfg.harmonic_n_max = 500;
  cfg.optimizer.dimension_cap = 3;
  cfg.optimizer.restarts = 6;
  auto br = hardy_bracket(parse_mean("P[0]"), cfg);
  CHECK(br.lower_hn.size() == 3);
  bool capped = false;
  for (const auto& f : br.flags) capped = capped || f == "dimension cap reached";
  CHECK(capped);
}
