#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hardylab/errors.hpp"
#include "hardylab/grammar.hpp"
#include "hardylab/kedlaya.hpp"
#include "hardylab/numerics.hpp"

using namespace hardylab;
namespace ked = hardylab::kedlaya;

namespace {

std::vector<double> random_positive(std::mt19937_64& rng, int len) {
  std::uniform_real_distribution<double> unit(1e-3, 10.0);
  std::vector<double> x(static_cast<std::size_t>(len));
  for (auto& v : x) v = unit(rng);
  return x;
}

}  // namespace

TEST_CASE("alpha profiles for n = 3") {
  // p=1: everything is the value 1; p=3: half 1s, half 2s; p=6: uniform
  long expect1[3] = {6, 0, 0};
  long expect3[3] = {3, 3, 0};
  long expect6[3] = {2, 2, 2};
  for (int s = 1; s <= 3; ++s) {
    CHECK(ked::alpha(3, 1, s) == expect1[s - 1]);
    CHECK(ked::alpha(3, 3, s) == expect3[s - 1]);
    CHECK(ked::alpha(3, 6, s) == expect6[s - 1]);
  }
}

TEST_CASE("alpha rows always sum to n factorial") {
  for (int n = 1; n <= 6; ++n) {
    long size = ked::factorial(n);
    for (long p = 1; p <= size; ++p) {
      long sum = 0;
      for (int s = 1; s <= n; ++s) sum += ked::alpha(n, p, s);
      CHECK(sum == size);
    }
  }
}

TEST_CASE("alpha rejects out-of-range indices") {
  CHECK_THROWS_AS(ked::alpha(3, 0, 1), DomainError);
  CHECK_THROWS_AS(ked::alpha(3, 7, 1), DomainError);
  CHECK_THROWS_AS(ked::alpha(3, 1, 0), DomainError);
  CHECK_THROWS_AS(ked::alpha(3, 1, 4), DomainError);
  CHECK_THROWS_AS(ked::alpha(0, 1, 1), DomainError);
}

TEST_CASE("tiny matrices are forced") {
  auto one = ked::build(1);
  REQUIRE(one.size == 1);
  CHECK(one.at(0, 0) == 1);

  auto two = ked::build(2);
  REQUIRE(two.size == 2);
  CHECK(two.at(0, 0) == 1);
  CHECK(two.at(0, 1) == 1);
  CHECK(two.at(1, 0) == 1);
  CHECK(two.at(1, 1) == 2);
}

TEST_CASE("built matrices pass verification") {
  for (int n = 1; n <= 5; ++n) {
    auto K = ked::build(n);
    CHECK(K.size == ked::factorial(n));
    CHECK(ked::verify(K).empty());
  }
}

TEST_CASE("the 720x720 case needs the extended cap") {
  CHECK_THROWS_AS(ked::build(6), DomainError);
  auto K = ked::build(6, 6);
  CHECK(K.size == 720);
  CHECK(ked::verify(K).empty());
}

TEST_CASE("verification pinpoints a bad column") {
  ked::KedlayaMatrix K{2, 2, {1, 1, 2, 1}};  // [[1,1],[2,1]]
  auto v = ked::verify(K);
  REQUIRE(v.size() == 4);
  bool found = false;
  for (const auto& viol : v) {
    if (viol.axis == 'c' && viol.index == 1 && viol.value == 1) {
      CHECK(viol.expected == 2);
      CHECK(viol.actual == 1);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("verification catches a single tampered entry") {
  auto K = ked::build(4);
  std::size_t cell = 5 * static_cast<std::size_t>(K.size) + 17;
  std::uint8_t old = K.entries[cell];
  K.entries[cell] = old == 1 ? 2 : 1;
  auto v = ked::verify(K);
  CHECK_FALSE(v.empty());
  K.entries[cell] = old;
  CHECK(ked::verify(K).empty());
}

TEST_CASE("mixing inequality hand example") {
  auto r = ked::check_mixing_inequality(parse_mean("P[0]"), std::vector<double>{1.0, 4.0});
  CHECK(r.lhs == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(2.0 * std::sqrt(2.5)).epsilon(1e-13));
  CHECK(r.holds);
  // the corollary side replaces prefix averages by 1/i and scales by sum x
  CHECK(r.corollary_rhs == doctest::Approx(2.0 * std::sqrt(0.5) * 5.0).epsilon(1e-13));
  CHECK(r.corollary_holds);
  CHECK(r.rhs <= r.corollary_rhs + 1e-12);
}

TEST_CASE("mixing inequality is tight on constant vectors") {
  for (const char* expr : {"P[0]", "P[0.5]", "sq(P[0],P[-1])"}) {
    MeanExpr e = parse_mean(expr);
    for (int n = 1; n <= 5; ++n) {
      std::vector<double> x(static_cast<std::size_t>(n), 3.25);
      auto r = ked::check_mixing_inequality(e, x);
      CHECK(relative_diff(r.lhs, r.rhs) < 1e-13);
      CHECK(r.lhs == doctest::Approx(n * 3.25).epsilon(1e-13));
      CHECK(r.holds);
    }
  }
}

TEST_CASE("mixing inequality holds for concave means on seeded trials") {
  for (const char* expr : {"P[0]", "P[0.5]", "sq(P[0],P[-1])", "sq(P[0.5],P[0])"}) {
    MeanExpr e = parse_mean(expr);
    for (int n : {2, 3, 4}) {
      for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(stream_seed(2026, static_cast<std::uint64_t>(n * 1000 + trial)));
        auto x = random_positive(rng, n);
        auto r = ked::check_mixing_inequality(e, x);
        CHECK(r.holds);
        CHECK(r.corollary_holds);
      }
    }
  }
}

TEST_CASE("a convex mean violates the mixing inequality") {
  MeanExpr e = parse_mean("P[2]");
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(stream_seed(2026, static_cast<std::uint64_t>(trial)));
    auto x = random_positive(rng, 3);
    if (!ked::check_mixing_inequality(e, x).holds) ++violations;
  }
  CHECK(violations >= 1);
}

TEST_CASE("mixing check validates its input") {
  MeanExpr e = parse_mean("P[0]");
  CHECK_THROWS_AS(ked::check_mixing_inequality(e, std::vector<double>{}), DomainError);
  CHECK_THROWS_AS(ked::check_mixing_inequality(e, std::vector<double>(6, 1.0)), DomainError);
  CHECK_THROWS_AS(ked::check_mixing_inequality(e, std::vector<double>{1.0, -1.0}), DomainError);
}
