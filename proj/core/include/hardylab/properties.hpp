#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardylab/means.hpp"

namespace hardylab {

// Audits accept any positive n-ary function so that deliberate bad actors
// (asymmetric or nonmonotone test doubles) can exercise the failure paths.
using VectorMean = std::function<double(std::span<const double>)>;

VectorMean vector_mean(const MeanExpr& e);

struct AuditWitness {
  std::vector<double> x;
  std::vector<double> y;  // partner input: permuted / midpoint mate / raised / repeated
  double lhs = 0.0;
  double rhs = 0.0;
  long m = 0;  // repetition factor when relevant
  std::string note;
};

struct AuditReport {
  std::string property;
  int trials = 0;
  bool pass = true;
  std::optional<AuditWitness> witness;  // present exactly when pass is false
  std::uint64_t seed = 0;
  std::string note;  // e.g. vacuous implication
};

// Every audit runs a handful of canonical probes first (the known sharp
// examples), then `trials` seeded random trials with per-trial RNG streams.
// Tolerances are relative to the larger side; audits are evidence with
// recorded seeds, not proofs.

AuditReport audit_symmetry(const VectorMean& f, int trials, std::uint64_t seed);
AuditReport audit_symmetry(const MeanExpr& e, int trials, std::uint64_t seed);

AuditReport audit_midpoint_concavity(const VectorMean& f, int trials, std::uint64_t seed);
AuditReport audit_midpoint_concavity(const MeanExpr& e, int trials, std::uint64_t seed);

AuditReport audit_monotonicity(const VectorMean& f, int trials, std::uint64_t seed);
AuditReport audit_monotonicity(const MeanExpr& e, int trials, std::uint64_t seed);

enum class RepetitionMode { Invariant, Superinvariant };

AuditReport audit_repetition(const VectorMean& f, RepetitionMode mode, int trials,
                             std::uint64_t seed, int m_max = 4);
AuditReport audit_repetition(const MeanExpr& e, RepetitionMode mode, int trials,
                             std::uint64_t seed, int m_max = 4);

// Meta-check: if midpoint concavity passes then monotonicity must pass too.
// A failed premise makes the implication vacuous (noted in the report).
AuditReport audit_concave_implies_monotone(const VectorMean& f, int trials, std::uint64_t seed);
AuditReport audit_concave_implies_monotone(const MeanExpr& e, int trials, std::uint64_t seed);

// Algebraic identity tying the two pair mixes of power means together:
//   p != 0:  circ^p = (n/(n-1)) * square^p - (1/(n-1)) * plain^p
//   p == 0:  circ = (square^n / plain)^(1/(n-1))
// evaluated two ways on random vectors; residual tolerance 1e-10 relative.
AuditReport audit_circ_square_identity(double p, double q, int trials, std::uint64_t seed);

}  // namespace hardylab
