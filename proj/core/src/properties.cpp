#include "hardylab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hardylab/errors.hpp"
#include "hardylab/numerics.hpp"

namespace hardylab {
namespace {

constexpr double kEqualTol = 1e-12;
constexpr double kIdentityTol = 1e-10;

void require_trials(int trials) {
  if (trials < 1) {
    throw DomainError("audit needs at least one trial");
  }
}

double scale_of(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

int random_length(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> length(2, 6);
  return length(rng);
}

// Log-uniform over [1e-3, 1e3] so trials cover six decades of scale.
std::vector<double> random_vector(std::mt19937_64& rng, int length) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log(1e-3);
  const double hi = std::log(1e3);
  std::vector<double> x(static_cast<std::size_t>(length));
  for (double& v : x) {
    v = std::exp(lo + (hi - lo) * unit(rng));
  }
  return x;
}

std::vector<double> repeat_vector(std::span<const double> x, int m) {
  std::vector<double> y;
  y.reserve(x.size() * static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    y.insert(y.end(), x.begin(), x.end());
  }
  return y;
}

AuditWitness make_witness(std::span<const double> x, std::span<const double> y, double lhs,
                          double rhs, long m, std::string note) {
  return AuditWitness{{x.begin(), x.end()}, {y.begin(), y.end()}, lhs, rhs, m, std::move(note)};
}

}  // namespace

VectorMean vector_mean(const MeanExpr& e) {
  return [e](std::span<const double> x) { return eval_mean(e, x); };
}

AuditReport audit_symmetry(const VectorMean& f, int trials, std::uint64_t seed) {
  require_trials(trials);
  AuditReport report{"symmetry", trials, true, std::nullopt, seed, ""};

  auto check = [&](std::span<const double> x, std::span<const double> y, const char* note) {
    const double lhs = f(x);
    const double rhs = f(y);
    if (std::abs(lhs - rhs) <= kEqualTol * scale_of(lhs, rhs)) {
      return true;
    }
    report.pass = false;
    report.witness = make_witness(x, y, lhs, rhs, 0, note);
    return false;
  };

  const std::vector<double> pair{1.0, 2.0};
  const std::vector<double> pair_swapped{2.0, 1.0};
  const std::vector<double> triple{1.0, 2.0, 3.0};
  const std::vector<double> triple_reversed{3.0, 2.0, 1.0};
  if (!check(pair, pair_swapped, "canonical swap")) return report;
  if (!check(triple, triple_reversed, "canonical reversal")) return report;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(trial)));
    const std::vector<double> x = random_vector(rng, random_length(rng));
    std::vector<double> y = x;
    std::shuffle(y.begin(), y.end(), rng);
    if (!check(x, y, "random permutation")) return report;
  }
  return report;
}

AuditReport audit_symmetry(const MeanExpr& e, int trials, std::uint64_t seed) {
  return audit_symmetry(vector_mean(e), trials, seed);
}

AuditReport audit_midpoint_concavity(const VectorMean& f, int trials, std::uint64_t seed) {
  require_trials(trials);
  AuditReport report{"midpoint-concavity", trials, true, std::nullopt, seed, ""};

  auto check = [&](std::span<const double> x, std::span<const double> y, const char* note) {
    std::vector<double> mid(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      mid[i] = 0.5 * (x[i] + y[i]);
    }
    const double lhs = f(mid);
    const double rhs = 0.5 * (f(x) + f(y));
    if (lhs >= rhs - kEqualTol * scale_of(lhs, rhs)) {
      return true;
    }
    report.pass = false;
    report.witness = make_witness(x, y, lhs, rhs, 0, note);
    return false;
  };

  const std::vector<double> flat{1.0, 1.0};
  const std::vector<double> tilted{3.0, 1.0};
  const std::vector<double> rising{1.0, 4.0};
  const std::vector<double> falling{4.0, 1.0};
  if (!check(flat, tilted, "canonical pair (1,1)/(3,1)")) return report;
  if (!check(rising, falling, "canonical pair (1,4)/(4,1)")) return report;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(trial)));
    const int length = random_length(rng);
    const std::vector<double> x = random_vector(rng, length);
    const std::vector<double> y = random_vector(rng, length);
    if (!check(x, y, "random midpoint")) return report;
  }
  return report;
}

AuditReport audit_midpoint_concavity(const MeanExpr& e, int trials, std::uint64_t seed) {
  return audit_midpoint_concavity(vector_mean(e), trials, seed);
}

AuditReport audit_monotonicity(const VectorMean& f, int trials, std::uint64_t seed) {
  require_trials(trials);
  AuditReport report{"monotonicity", trials, true, std::nullopt, seed, ""};

  auto check = [&](std::span<const double> x, std::size_t index, double bump, const char* note) {
    std::vector<double> raised(x.begin(), x.end());
    raised[index] += bump;
    const double lhs = f(raised);
    const double rhs = f(x);
    if (lhs >= rhs - kEqualTol * scale_of(lhs, rhs)) {
      return true;
    }
    report.pass = false;
    report.witness = make_witness(x, raised, lhs, rhs, 0,
                                  std::string(note) + " at coordinate " + std::to_string(index));
    return false;
  };

  const std::vector<double> low_first{1.0, 2.0};
  const std::vector<double> low_second{4.0, 1.0};
  if (!check(low_first, 0, 1.0, "canonical raise")) return report;
  if (!check(low_second, 1, 2.0, "canonical raise")) return report;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(trial)));
    const std::vector<double> x = random_vector(rng, random_length(rng));
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t index = pick(rng);
    const double bump = (0.01 + 0.99 * unit(rng)) * x[index];
    if (!check(x, index, bump, "random raise")) return report;
  }
  return report;
}

AuditReport audit_monotonicity(const MeanExpr& e, int trials, std::uint64_t seed) {
  return audit_monotonicity(vector_mean(e), trials, seed);
}

AuditReport audit_repetition(const VectorMean& f, RepetitionMode mode, int trials,
                             std::uint64_t seed, int m_max) {
  require_trials(trials);
  if (m_max < 2) {
    throw DomainError("repetition audit needs m_max >= 2");
  }
  const bool invariant = mode == RepetitionMode::Invariant;
  AuditReport report{invariant ? "repetition-invariance" : "repetition-superinvariance", trials,
                     true, std::nullopt, seed, ""};

  auto check = [&](std::span<const double> x, int m, const char* note) {
    const std::vector<double> repeated = repeat_vector(x, m);
    const double lhs = f(repeated);
    const double rhs = f(x);
    const double slack = kEqualTol * scale_of(lhs, rhs);
    const bool ok = invariant ? std::abs(lhs - rhs) <= slack : lhs >= rhs - slack;
    if (ok) {
      return true;
    }
    report.pass = false;
    report.witness = make_witness(x, repeated, lhs, rhs, m, note);
    return false;
  };

  const std::vector<double> pair{1.0, 4.0};
  if (!check(pair, 2, "canonical pair doubled")) return report;
  if (!check(pair, std::min(3, m_max), "canonical pair repeated")) return report;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(trial)));
    const std::vector<double> x = random_vector(rng, random_length(rng));
    std::uniform_int_distribution<int> factor(2, m_max);
    if (!check(x, factor(rng), "random repetition")) return report;
  }
  return report;
}

AuditReport audit_repetition(const MeanExpr& e, RepetitionMode mode, int trials,
                             std::uint64_t seed, int m_max) {
  return audit_repetition(vector_mean(e), mode, trials, seed, m_max);
}

AuditReport audit_concave_implies_monotone(const VectorMean& f, int trials, std::uint64_t seed) {
  const AuditReport premise = audit_midpoint_concavity(f, trials, seed);
  AuditReport report{"concave-implies-monotone", trials, true, std::nullopt, seed, ""};
  if (!premise.pass) {
    report.note = "midpoint concavity fails, so the implication is vacuous";
    return report;
  }
  const AuditReport conclusion = audit_monotonicity(f, trials, seed);
  if (!conclusion.pass) {
    report.pass = false;
    report.witness = conclusion.witness;
    report.note = "midpoint concavity passed yet monotonicity failed";
  }
  return report;
}

AuditReport audit_concave_implies_monotone(const MeanExpr& e, int trials, std::uint64_t seed) {
  return audit_concave_implies_monotone(vector_mean(e), trials, seed);
}

AuditReport audit_circ_square_identity(double p, double q, int trials, std::uint64_t seed) {
  require_trials(trials);
  const MeanExpr circ = MeanExpr::circ(MeanExpr::power(p), MeanExpr::power(q));
  const MeanExpr square = MeanExpr::square(MeanExpr::power(p), MeanExpr::power(q));
  const MeanExpr plain = MeanExpr::power(p);
  AuditReport report{"circ-square identity", trials, true, std::nullopt, seed, ""};

  auto check = [&](std::span<const double> v, const char* note) {
    const double n = static_cast<double>(v.size());
    const double circ_val = eval_mean(circ, v);
    const double square_val = eval_mean(square, v);
    const double plain_val = eval_mean(plain, v);
    double recombined = std::numeric_limits<double>::quiet_NaN();
    if (p == 0.0) {
      recombined = std::exp((n * std::log(square_val) - std::log(plain_val)) / (n - 1.0));
    } else {
      const double base =
          (n * std::pow(square_val, p) - std::pow(plain_val, p)) / (n - 1.0);
      if (base > 0.0) {
        recombined = std::pow(base, 1.0 / p);
      }
    }
    if (std::isfinite(recombined) &&
        std::abs(circ_val - recombined) <= kIdentityTol * scale_of(circ_val, recombined)) {
      return true;
    }
    report.pass = false;
    report.witness = make_witness(v, {}, circ_val, recombined, 0, note);
    return false;
  };

  const std::vector<double> pair{1.0, 4.0};
  if (!check(pair, "canonical pair")) return report;

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(trial)));
    const std::vector<double> v = random_vector(rng, random_length(rng));
    if (!check(v, "random vector")) return report;
  }
  return report;
}

}  // namespace hardylab
