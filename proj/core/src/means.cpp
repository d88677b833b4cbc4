#include "hardylab/means.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "hardylab/numerics.hpp"

namespace hardylab {

namespace {

void validate_entries(const std::vector<SampleEntry>& entries) {
  if (entries.empty()) throw DomainError("sample must be nonempty");
  for (const auto& e : entries) {
    if (!(e.value > 0.0) || !std::isfinite(e.value))
      throw DomainError("sample values must be positive finite reals");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw DomainError("sample weights must be positive finite reals");
  }
}

}  // namespace

WeightedSample::WeightedSample(std::vector<SampleEntry> entries) : entries_(std::move(entries)) {
  validate_entries(entries_);
}

WeightedSample::WeightedSample(std::initializer_list<SampleEntry> entries) : entries_(entries) {
  validate_entries(entries_);
}

WeightedSample WeightedSample::from_values(std::span<const double> values, double weight) {
  std::vector<SampleEntry> entries;
  entries.reserve(values.size());
  for (double v : values) entries.push_back({v, weight});
  return WeightedSample(std::move(entries));
}

double WeightedSample::min_value() const noexcept {
  double m = entries_.front().value;
  for (const auto& e : entries_) m = std::min(m, e.value);
  return m;
}

double WeightedSample::max_value() const noexcept {
  double m = entries_.front().value;
  for (const auto& e : entries_) m = std::max(m, e.value);
  return m;
}

double WeightedSample::total_weight() const noexcept {
  NeumaierSum s;
  for (const auto& e : entries_) s.add(e.weight);
  return s.value();
}

bool WeightedSample::integer_weights() const noexcept {
  for (const auto& e : entries_) {
    if (std::floor(e.weight) != e.weight) return false;
  }
  return true;
}

WeightedSample WeightedSample::merged(double tol) const {
  std::vector<SampleEntry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(),
            [](const SampleEntry& a, const SampleEntry& b) { return a.value < b.value; });
  std::vector<SampleEntry> out;
  for (const auto& e : sorted) {
    if (!out.empty() && e.value - out.back().value <= tol) {
      auto& last = out.back();
      double w = last.weight + e.weight;
      // Weighted value keeps inexact merges centered; exact merges unchanged.
      last.value = (last.value * last.weight + e.value * e.weight) / w;
      last.weight = w;
    } else {
      out.push_back(e);
    }
  }
  return WeightedSample(std::move(out));
}

struct MeanExpr::Node {
  Kind kind;
  double p = 0.0;
  std::shared_ptr<const Node> outer;
  std::shared_ptr<const Node> inner;
};

MeanExpr MeanExpr::power(double p) {
  if (!std::isfinite(p)) throw DomainError("power exponent must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Power;
  node->p = p;
  return MeanExpr(std::move(node));
}

MeanExpr MeanExpr::circ(MeanExpr outer, MeanExpr inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Circ;
  node->outer = std::move(outer.node_);
  node->inner = std::move(inner.node_);
  return MeanExpr(std::move(node));
}

MeanExpr MeanExpr::square(MeanExpr outer, MeanExpr inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Square;
  node->outer = std::move(outer.node_);
  node->inner = std::move(inner.node_);
  return MeanExpr(std::move(node));
}

MeanExpr::Kind MeanExpr::kind() const noexcept { return node_->kind; }

double MeanExpr::exponent() const {
  if (node_->kind != Kind::Power) throw DomainError("exponent() requires a power leaf");
  return node_->p;
}

MeanExpr MeanExpr::outer() const {
  if (node_->kind == Kind::Power) throw DomainError("outer() requires a mix node");
  return MeanExpr(node_->outer);
}

MeanExpr MeanExpr::inner() const {
  if (node_->kind == Kind::Power) throw DomainError("inner() requires a mix node");
  return MeanExpr(node_->inner);
}

bool MeanExpr::is_power() const noexcept { return node_->kind == Kind::Power; }

bool MeanExpr::contains_circ() const noexcept {
  if (node_->kind == Kind::Power) return false;
  if (node_->kind == Kind::Circ) return true;
  return MeanExpr(node_->outer).contains_circ() || MeanExpr(node_->inner).contains_circ();
}

std::optional<double> as_power(const MeanExpr& e) {
  if (!e.is_power()) return std::nullopt;
  return e.exponent();
}

std::optional<PowerMix> as_power_mix(const MeanExpr& e) {
  if (e.is_power()) return std::nullopt;
  MeanExpr out = e.outer();
  MeanExpr in = e.inner();
  if (!out.is_power() || !in.is_power()) return std::nullopt;
  PairKind kind = e.kind() == MeanExpr::Kind::Circ ? PairKind::Circ : PairKind::Square;
  return PowerMix{kind, out.exponent(), in.exponent()};
}

double eval_power(double p, const WeightedSample& s, const EvalOptions& opt) {
  const auto& entries = s.entries();
  if (entries.size() == 1) return entries.front().value;
  double total = s.total_weight();

  double log_mean;
  if (p == 0.0) {
    NeumaierSum acc;
    for (const auto& e : entries) acc.add((e.weight / total) * std::log(e.value));
    log_mean = acc.value();
  } else if (opt.log_domain) {
    // Shifted accumulation of sum w x^p: factor out the largest term so every
    // exponential is <= 1.
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries) shift = std::max(shift, p * std::log(e.value));
    NeumaierSum acc;
    for (const auto& e : entries)
      acc.add((e.weight / total) * std::exp(p * std::log(e.value) - shift));
    double sum = acc.value();
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw EvalError("power sum degenerated in log-domain accumulation", p);
    log_mean = (shift + std::log(sum)) / p;
  } else {
    NeumaierSum acc;
    for (const auto& e : entries) acc.add((e.weight / total) * std::pow(e.value, p));
    double sum = acc.value();
    if (!std::isfinite(sum) || !(sum > 0.0))
      throw EvalError("power sum overflowed; retry with log-domain evaluation", p);
    log_mean = std::log(sum) / p;
  }

  double result = std::exp(log_mean);
  if (!std::isfinite(result)) throw EvalError("power mean overflowed", p);
  return std::clamp(result, s.min_value(), s.max_value());
}

PairExpansion expand_pairs(PairKind kind, const WeightedSample& s) {
  const auto& entries = s.entries();
  PairExpansion out;

  if (kind == PairKind::Square) {
    out.pairs.reserve(entries.size() * entries.size());
    for (const auto& a : entries)
      for (const auto& b : entries) out.pairs.push_back({a.value, b.value, a.weight * b.weight});
    return out;
  }

  if (!s.integer_weights())
    throw DomainError("circ mix requires integer multiplicities; fractional repetition is undefined");
  if (entries.size() == 1 && entries.front().weight == 1.0) {
    out.unary = true;
    return out;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double d = entries[i].weight * (entries[i].weight - 1.0) / 2.0;
    if (d > 0.0) out.pairs.push_back({entries[i].value, entries[i].value, d});
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      out.pairs.push_back({entries[i].value, entries[j].value, entries[i].weight * entries[j].weight});
  }
  return out;
}

double eval_mean(const MeanExpr& e, const WeightedSample& s, const EvalOptions& opt) {
  if (e.is_power()) return eval_power(e.exponent(), s.merged(opt.merge_tolerance), opt);

  WeightedSample base = s.merged(opt.merge_tolerance);
  PairKind kind = e.kind() == MeanExpr::Kind::Circ ? PairKind::Circ : PairKind::Square;
  PairExpansion expansion = expand_pairs(kind, base);
  if (expansion.unary) return base.entries().front().value;

  // The inner mean is symmetric by construction, so each unordered pair is
  // evaluated once.
  MeanExpr inner = e.inner();
  std::map<std::pair<double, double>, double> cache;
  std::vector<SampleEntry> outer_input;
  outer_input.reserve(expansion.pairs.size());
  for (const auto& pr : expansion.pairs) {
    auto key = std::minmax(pr.first, pr.second);
    auto it = cache.find(key);
    double v;
    if (it != cache.end()) {
      v = it->second;
    } else {
      double xs[2] = {key.first, key.second};
      v = eval_mean(inner, WeightedSample::from_values(xs), opt);
      cache.emplace(key, v);
    }
    outer_input.push_back({v, pr.weight});
  }
  double result = eval_mean(e.outer(), WeightedSample(std::move(outer_input)), opt);
  return std::clamp(result, base.min_value(), base.max_value());
}

double eval_mean(const MeanExpr& e, std::span<const double> values, const EvalOptions& opt) {
  return eval_mean(e, WeightedSample::from_values(values), opt);
}

double eval_repeated(const MeanExpr& e, std::span<const double> values, long m,
                     const EvalOptions& opt) {
  if (m < 1) throw DomainError("repetition count must be >= 1");
  return eval_mean(e, WeightedSample::from_values(values, static_cast<double>(m)), opt);
}

HomogenizationEstimate homogenize_estimate(const MeanExpr& e, std::span<const double> values,
                                           std::span<const double> t_grid,
                                           const EvalOptions& opt) {
  if (t_grid.empty()) throw DomainError("homogenization grid must be nonempty");
  for (double t : t_grid) {
    if (!(t > 0.0) || t > 1.0) throw DomainError("homogenization grid values must lie in (0,1]");
  }
  std::size_t tail_start = t_grid.size() / 2;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::vector<double> scaled(values.size());
  for (std::size_t k = tail_start; k < t_grid.size(); ++k) {
    double t = t_grid[k];
    for (std::size_t i = 0; i < values.size(); ++i) scaled[i] = t * values[i];
    double r = eval_mean(e, scaled, opt) / t;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

}  // namespace hardylab
