#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardylab/means.hpp"

namespace hardylab {

// Sharp Hardy constant of the p-th power mean: (1-p)^{-1/p} for p < 1 (e at
// p = 0) and +infinity for p >= 1.
double gamma(double p);

// Prefix means m_i = eval of e on (x_1..x_i) for every i, computed with the
// incremental pair-sum kernels where the expression shape allows it. This is
// the shared engine behind the harmonic lower bound, the truncated Hardy
// check and the H_n objective.
std::vector<double> prefix_means(const MeanExpr& e, std::span<const double> x);

struct HarmonicTail {
  double estimate;       // selected liminf estimate for the C functional
  double raw_tail_min;   // minimum of a_n over the tail window
  std::optional<double> accelerated;  // Aitken on a_{N/4}, a_{N/2}, a_N
  bool diverging = false;
  long n_used = 0;       // effective largest n after any capping
  std::vector<std::pair<long, double>> tail;  // sampled (n, a_n) from the window
};

// a_n = n * eval of e on (1, 1/2, ..., 1/n). The liminf of a_n bounds the
// Hardy constant from below. `extrapolate` selects the accelerated value when
// it exists and the sequence does not look divergent.
HarmonicTail harmonic_lower_bound(const MeanExpr& e, long n_max, bool extrapolate = true);

struct OptimizerConfig {
  int restarts = 32;
  int iterations = 500;
  double simplex_scale = 1.0;
  std::uint64_t seed = 0;
  int dimension_cap = 12;
};

struct HardyNLower {
  double value;
  std::vector<double> maximizer;  // normalized to sum 1
  bool boundary_suspected = false;
  int discarded_restarts = 0;
};

// Best found value of (sum of prefix means)/(sum of x) over the open simplex,
// a certified lower bound for the n-term Hardy constant. Seed-deterministic
// multi-start Nelder-Mead in softmax coordinates. An optional warm start is
// added to the canonical start list.
HardyNLower hardy_n_lower(const MeanExpr& e, int n, const OptimizerConfig& cfg = {},
                          std::span<const double> warm_start = {});

// n * eval of e on the sample {1/i with equal weights}, the superinvariant
// upper bound for the n-term constant of symmetric concave repetition
// superinvariant means.
double superinvariant_upper_bound(const MeanExpr& e, int n);

// Classical upper bound gamma_p / (n(e^{1/n}-1)) for P[p], 0 <= p < 1.
double kaluza_szego_bound(double p, int n);

// Classical upper bound (1+1/n)^n for P[0].
double hlp_bound(int n);

struct HardyMarginReport {
  double margin;  // C*sum(x) - sum of prefix means; >= 0 is consistent with constant C
  double sum_values;
  double sum_prefix_means;
  std::vector<double> prefix_partial;  // running sums of the prefix means
};

HardyMarginReport truncated_hardy_check(const MeanExpr& e, std::span<const double> x, double C);

// Deterministic positive summable test vectors (geometric and power-law
// decay, lengths 40..120), stream-seeded per sample index.
std::vector<std::vector<double>> seeded_l1_samples(std::uint64_t seed, int count);

struct HardyN {
  int n;
  double lower;
  std::vector<double> maximizer;
};

struct HardyBracket {
  MeanExpr expr;
  HarmonicTail harmonic;
  std::vector<HardyN> lower_hn;
  std::vector<std::pair<int, double>> upper_theorem;
  std::optional<double> gamma_reference;  // power leaves; may be +infinity
  std::optional<double> rho_reference;    // power mixes with p,q <= 1
  std::vector<std::string> flags;
};

struct BracketConfig {
  int hn_max = 8;
  long harmonic_n_max = 4000;
  bool extrapolate = true;
  OptimizerConfig optimizer{};
  double rho_tol = 1e-6;
};

HardyBracket hardy_bracket(const MeanExpr& e, const BracketConfig& cfg = {});

}  // namespace hardylab
