#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

struct SampleEntry {
  double value;
  double weight;
};

// Positive values with positive real multiplicity weights. Plain vectors are
// samples with unit weights. Weights are real so factorial multiplicities can
// be absorbed by normalization instead of overflowing an integer type.
class WeightedSample {
public:
  explicit WeightedSample(std::vector<SampleEntry> entries);
  WeightedSample(std::initializer_list<SampleEntry> entries);
  static WeightedSample from_values(std::span<const double> values, double weight = 1.0);

  const std::vector<SampleEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double min_value() const noexcept;
  double max_value() const noexcept;
  double total_weight() const noexcept;
  bool integer_weights() const noexcept;

  // New sample with entries whose values differ by at most tol merged
  // (weights summed). tol = 0 merges exact duplicates only.
  WeightedSample merged(double tol = 0.0) const;

private:
  std::vector<SampleEntry> entries_;
};

enum class PairKind { Circ, Square };

// Immutable expression tree: a power-mean leaf P[p], or a two-level mix where
// the inner mean is taken over pairs of sample positions and the outer mean
// over the resulting pair values. Circ uses unordered distinct-position
// pairs, Square uses all ordered pairs including the diagonal.
class MeanExpr {
public:
  enum class Kind { Power, Circ, Square };

  static MeanExpr power(double p);
  static MeanExpr circ(MeanExpr outer, MeanExpr inner);
  static MeanExpr square(MeanExpr outer, MeanExpr inner);

  Kind kind() const noexcept;
  double exponent() const;  // Power leaves only
  MeanExpr outer() const;   // Circ and Square only
  MeanExpr inner() const;

  bool is_power() const noexcept;
  bool contains_circ() const noexcept;

private:
  struct Node;
  explicit MeanExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// The shape most estimators specialize on: a single mix of two power leaves.
struct PowerMix {
  PairKind kind;
  double p;
  double q;
};

std::optional<double> as_power(const MeanExpr& e);
std::optional<PowerMix> as_power_mix(const MeanExpr& e);

struct EvalOptions {
  bool log_domain = true;
  double merge_tolerance = 0.0;
};

// One pair produced by expand_pairs with the multiplicity it carries into the
// outer mean. The pair arguments are kept so the inner mean can be applied.
struct PairEntry {
  double first;
  double second;
  double weight;
};

struct PairExpansion {
  bool unary = false;  // Circ on a single entry of weight 1: value passes through
  std::vector<PairEntry> pairs;
};

double eval_power(double p, const WeightedSample& s, const EvalOptions& opt = {});
PairExpansion expand_pairs(PairKind kind, const WeightedSample& s);
double eval_mean(const MeanExpr& e, const WeightedSample& s, const EvalOptions& opt = {});
double eval_mean(const MeanExpr& e, std::span<const double> values, const EvalOptions& opt = {});

// Every value of x taken with multiplicity m.
double eval_repeated(const MeanExpr& e, std::span<const double> values, long m,
                     const EvalOptions& opt = {});

struct HomogenizationEstimate {
  double lower;
  double upper;
};

// Scans t -> eval_mean(e, t*x)/t over the tail of a decreasing grid in (0,1]
// and reports the min and max seen. Both equal eval_mean(e, x) for
// homogeneous expressions.
HomogenizationEstimate homogenize_estimate(const MeanExpr& e, std::span<const double> values,
                                           std::span<const double> t_grid,
                                           const EvalOptions& opt = {});

}  // namespace hardylab
