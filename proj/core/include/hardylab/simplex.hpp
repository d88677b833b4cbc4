#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hardylab {

struct NelderMeadOptions {
  int max_iterations = 500;
  double initial_step = 1.0;
  double f_tolerance = 1e-12;
  double x_tolerance = 1e-10;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int iterations;
  bool converged;
};

// Classic downhill simplex minimizer (reflection 1, expansion 2, contraction
// 1/2, shrink 1/2). Non-finite objective values are treated as +infinity, so
// the search backs away from invalid regions on its own.
NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0,
                                      const NelderMeadOptions& opt = {});

}  // namespace hardylab
