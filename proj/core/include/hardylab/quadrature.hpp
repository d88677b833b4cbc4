#pragma once

#include <functional>

namespace hardylab {

struct QuadratureOutcome {
  double value = 0.0;
  double abs_error = 0.0;
  long cells = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod 7/15 integration over the unit interval/square.
// Refinement bisects the worst cell (2-D: along the axis with the larger
// embedded-rule discrepancy) until the summed error estimate meets the
// target. `target_for_value` maps the current value estimate to the required
// absolute tolerance, so callers can express tolerance in a transformed
// space; it is re-evaluated as the estimate evolves. `cell_budget` caps the
// number of cell evaluations; exceeding it returns converged = false.
QuadratureOutcome integrate_unit_interval(const std::function<double(double)>& f,
                                          const std::function<double(double)>& target_for_value,
                                          long cell_budget);

QuadratureOutcome integrate_unit_square(const std::function<double(double, double)>& f,
                                        const std::function<double(double)>& target_for_value,
                                        long cell_budget);

}  // namespace hardylab
