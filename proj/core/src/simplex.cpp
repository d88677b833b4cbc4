#include "hardylab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hardylab {

namespace {

double guard(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x0, const NelderMeadOptions& opt) {
  const std::size_t dim = x0.size();
  if (dim == 0) return {{}, guard(f(x0)), 0, true};

  std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += opt.initial_step;
  std::vector<double> fv(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fv[i] = guard(f(pts[i]));

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), cand(dim);
  int iter = 0;
  bool converged = false;

  for (; iter < opt.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::size_t best = order.front(), worst = order.back(), second = order[dim ? dim - 1 : 0];

    double spread = fv[worst] - fv[best];
    double diam = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      diam = std::max(diam, std::abs(pts[worst][i] - pts[best][i]));
    if (std::isfinite(fv[worst]) &&
        (spread <= opt.f_tolerance * (std::abs(fv[best]) + opt.f_tolerance) ||
         diam <= opt.x_tolerance)) {
      converged = true;
      break;
    }

    for (std::size_t i = 0; i < dim; ++i) {
      double c = 0.0;
      for (std::size_t k = 0; k <= dim; ++k)
        if (k != worst) c += pts[k][i];
      centroid[i] = c / static_cast<double>(dim);
    }

    auto blend = [&](double t) {  // centroid + t*(centroid - worst)
      for (std::size_t i = 0; i < dim; ++i)
        cand[i] = centroid[i] + t * (centroid[i] - pts[worst][i]);
      return guard(f(cand));
    };

    double fr = blend(1.0);
    if (fr < fv[best]) {
      std::vector<double> refl = cand;
      double fe = blend(2.0);
      if (fe < fr) {
        pts[worst] = cand;
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(refl);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = cand;
      fv[worst] = fr;
      continue;
    }
    double fc = fr < fv[worst] ? blend(0.5) : blend(-0.5);
    if (fc < std::min(fr, fv[worst])) {
      pts[worst] = cand;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= dim; ++k) {  // shrink toward the best vertex
      if (k == best) continue;
      for (std::size_t i = 0; i < dim; ++i)
        pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
      fv[k] = guard(f(pts[k]));
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fv[i] < fv[best]) best = i;
  return {pts[best], fv[best], iter, converged};
}

}  // namespace hardylab
