#pragma once

#include <string>
#include <string_view>

#include "hardylab/means.hpp"

namespace hardylab {

// Expression grammar shared by the CLI and config files:
//   expr  := P[num] | circ(expr,expr) | sq(expr,expr)
//   num   := float | float/float
// Whitespace is allowed between tokens; exponents accept decimals,
// scientific notation and fractions like 1/2.
MeanExpr parse_mean(std::string_view text);

std::string to_string(const MeanExpr& e);

}  // namespace hardylab
