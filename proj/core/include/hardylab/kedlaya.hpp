#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hardylab/means.hpp"

namespace hardylab::kedlaya {

// n! as a long; n <= 20 keeps it exact.
long factorial(int n);

// Appearance count of value s in row (equivalently column) p of the n-th
// combinatorial matrix: n!/ceil(p/(n-1)!) when s <= ceil(p/(n-1)!), else 0.
// Rows sum to n! for every p. Indices are 1-based.
long alpha(int n, long p, int s);

struct KedlayaMatrix {
  int n = 1;
  long size = 1;                      // n!
  std::vector<std::uint8_t> entries;  // row-major, values in {1..n}

  std::uint8_t at(long row, long col) const {  // 0-based
    return entries[static_cast<std::size_t>(row * size + col)];
  }
};

// Places one value at a time, largest first, routing all appearances of the
// value through a bipartite max-flow against the rows' and columns' remaining
// demands. The result is certified by verify; infeasibility mid-build signals
// a bug here, since existence is a theorem.
KedlayaMatrix build(int n, int max_n = 5);

struct Violation {
  char axis;      // 'r' or 'c'
  long index;     // 1-based row/column
  int value;      // the value whose count is off
  long expected;
  long actual;
};

// Exact appearance-count comparison of every row and column against alpha.
std::vector<Violation> verify(const KedlayaMatrix& K);

struct MixingCheck {
  double lhs;  // sum over i of the mean of (x_1..x_i), each taken n!/i times
  double rhs;  // n times the mean of the prefix averages, each (n-1)! times
  bool holds;
  double corollary_rhs;  // n * mean of {(1/i, (n-1)!)} * sum(x)
  bool corollary_holds;
};

// Numerical check of the prefix-mixing inequality for a symmetric concave
// mean; the caller asserts the hypotheses (the properties module audits
// them). Comparisons carry 1e-12 relative slack.
MixingCheck check_mixing_inequality(const MeanExpr& e, std::span<const double> x);

}  // namespace hardylab::kedlaya
