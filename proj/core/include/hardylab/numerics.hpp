#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>

namespace hardylab {

// Neumaier's improved Kahan summation. Good to ~1 ulp of the true sum even
// when terms alternate in magnitude, which the pair-expansion sums do.
class NeumaierSum {
public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double neumaier_sum(std::span<const double> xs) noexcept {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// log(exp(a) + exp(b)) without overflow. Handles -inf identities.
inline double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

inline double relative_diff(double a, double b) noexcept {
  double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

// Aitken delta-squared applied to one triple. Returns nothing when the
// denominator is too small to trust (sequence already flat, or noise).
inline std::optional<double> aitken_extrapolate(double a0, double a1, double a2) noexcept {
  double d1 = a1 - a0;
  double d2 = a2 - a1;
  double denom = d2 - d1;
  double scale = std::max({std::abs(a0), std::abs(a1), std::abs(a2), 1.0});
  if (std::abs(denom) < 1e-14 * scale) return std::nullopt;
  double out = a2 - d2 * d2 / denom;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

// SplitMix64 mixer; the workhorse for deriving independent, reproducible RNG
// streams from (seed, index) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(seed ^ splitmix64(index + 0x51a7bb71d0c53bc1ULL));
}

}  // namespace hardylab
