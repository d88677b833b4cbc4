#pragma once

#include <optional>

namespace hardylab {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long cells = 0;
  bool converged = false;
};

// Sharp mixed-mean Hardy constant by adaptive quadrature over the unit
// square (interval when q = 0):
//   p,q != 0:  (integral of ((x^-q + y^-q)/2)^(p/q))^(1/p)
//   p = 0:     exp(integral of ln((x^-q + y^-q)/2) / q)
//   q = 0:     (integral of x^(-p/2))^(2/p)
//   p = q = 0: e, exactly
// Edge and corner singularities are removed by power substitutions before
// the rule sees the integrand. `tol` and the reported error are in units of
// the returned constant, not the raw integral.
QuadratureResult rho(double p, double q, double tol, long cell_budget = 1000000);

// Catalogued closed forms: q = 0 with p < 2, (0,0), (0,1), (0,-1).
std::optional<double> rho_closed(double p, double q);

// Whether the defining integral converges. Implementer-derived edge/corner
// analysis: q > 0 needs p < 1, otherwise p < 2 suffices (p = 0 always
// converges); validated against quadrature behavior in the test suite.
bool rho_finiteness(double p, double q);

// Self-test integral over the unit square of ln((x+y)/2), equal to
// ln 2 - 3/2. Exercises the logarithmic branch end to end.
QuadratureResult log_mean_integral(double tol, long cell_budget = 1000000);

}  // namespace hardylab
