#include "hardylab/rho.hpp"

#include <cmath>
#include <numbers>

#include "hardylab/errors.hpp"
#include "hardylab/numerics.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Power substitution x = u^k flattens the edge/corner behavior so the fixed
// rule sees a bounded, mostly polynomial integrand:
//   q > 0, p > 0: edge blow-up x^-p     -> k = 2/(1-p) leaves u^1
//   q < 0, p > 0: corner blow-up r^-p   -> k = 3/(2-p) leaves r^1
//   p = 0:        log edges/corner      -> k = 3 buries them under (uv)^2
//   p < 0:        bounded, kinked edges -> k = 2 restores smoothness
double substitution_power(double p, double q) {
  if (q == 0.0) return 4.0 / (2.0 - p);
  if (p == 0.0) return 3.0;
  if (p < 0.0) return 2.0;
  return q > 0.0 ? 2.0 / (1.0 - p) : 3.0 / (2.0 - p);
}

}  // namespace

bool rho_finiteness(double p, double q) {
  if (q > 0.0) return p < 1.0;
  return p < 2.0;
}

std::optional<double> rho_closed(double p, double q) {
  if (p == 0.0 && q == 0.0) return std::numbers::e;
  if (q == 0.0 && p < 2.0) return std::pow(1.0 - p / 2.0, -2.0 / p);
  if (p == 0.0 && q == 1.0) return 2.0 * std::exp(0.5);
  if (p == 0.0 && q == -1.0) return std::exp(1.5) / 2.0;
  return std::nullopt;
}

QuadratureResult rho(double p, double q, double tol, long cell_budget) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!rho_finiteness(p, q)) throw DomainError("infinite constant for these exponents");
  if (p == 0.0 && q == 0.0) return {std::numbers::e, 0.0, 0, true};

  const double k = substitution_power(p, q);
  QuadratureResult out;

  if (q == 0.0) {
    // 1-D integral of x^(-p/2); the substitution makes the integrand k*u.
    double expo = k * (1.0 - p / 2.0) - 1.0;
    auto f = [&](double u) { return std::exp(std::log(k) + expo * std::log(u)); };
    auto target = [&](double a) {
      double r = std::pow(a, 2.0 / p);
      return tol * std::abs(p) * a / (2.0 * r);
    };
    QuadratureOutcome res = integrate_unit_interval(f, target, cell_budget);
    double r = std::pow(res.value, 2.0 / p);
    out.value = r;
    out.abs_error_estimate = res.abs_error * 2.0 * r / (std::abs(p) * res.value);
    out.cells = res.cells;
    out.converged = res.converged;
    return out;
  }

  const double lnk2 = 2.0 * std::log(k);
  if (p == 0.0) {
    auto f = [&](double u, double v) {
      double lu = std::log(u), lv = std::log(v);
      double t = log_add_exp(-q * k * lu, -q * k * lv) - kLn2;
      return t * std::exp(lnk2 + (k - 1.0) * (lu + lv));
    };
    auto target = [&](double j) { return tol * std::abs(q) / std::exp(j / q); };
    QuadratureOutcome res = integrate_unit_square(f, target, cell_budget);
    double r = std::exp(res.value / q);
    out.value = r;
    out.abs_error_estimate = res.abs_error * r / std::abs(q);
    out.cells = res.cells;
    out.converged = res.converged;
    return out;
  }

  auto f = [&](double u, double v) {
    double lu = std::log(u), lv = std::log(v);
    double t = log_add_exp(-q * k * lu, -q * k * lv) - kLn2;
    return std::exp((p / q) * t + lnk2 + (k - 1.0) * (lu + lv));
  };
  auto target = [&](double i) {
    if (!(i > 0.0)) return tol;  // no scale information yet
    return tol * std::abs(p) * i / std::pow(i, 1.0 / p);
  };
  QuadratureOutcome res = integrate_unit_square(f, target, cell_budget);
  double r = std::pow(res.value, 1.0 / p);
  out.value = r;
  out.abs_error_estimate = res.abs_error * r / (std::abs(p) * res.value);
  out.cells = res.cells;
  out.converged = res.converged;
  return out;
}

QuadratureResult log_mean_integral(double tol, long cell_budget) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  // x = u^2, y = v^2 smooths the corner logarithm; jacobian 4uv.
  auto f = [](double u, double v) {
    return std::log((u * u + v * v) / 2.0) * 4.0 * u * v;
  };
  auto target = [&](double) { return tol; };
  QuadratureOutcome res = integrate_unit_square(f, target, cell_budget);
  return {res.value, res.abs_error, res.cells, res.converged};
}

}  // namespace hardylab
