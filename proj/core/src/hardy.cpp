#include "hardylab/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hardylab/numerics.hpp"
#include "hardylab/rho.hpp"
#include "hardylab/simplex.hpp"

namespace hardylab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pair terms are raised to r = p/q billions of times in the harmonic sweep;
// the common rational exponents get dedicated branches.
enum class FastPow { One, Two, Half, NegOne, NegTwo, NegHalf, Generic };

FastPow classify_pow(double r) {
  if (r == 1.0) return FastPow::One;
  if (r == 2.0) return FastPow::Two;
  if (r == 0.5) return FastPow::Half;
  if (r == -1.0) return FastPow::NegOne;
  if (r == -2.0) return FastPow::NegTwo;
  if (r == -0.5) return FastPow::NegHalf;
  return FastPow::Generic;
}

double apply_pow(FastPow fp, double r, double b) {
  switch (fp) {
    case FastPow::One: return b;
    case FastPow::Two: return b * b;
    case FastPow::Half: return std::sqrt(b);
    case FastPow::NegOne: return 1.0 / b;
    case FastPow::NegTwo: return 1.0 / (b * b);
    case FastPow::NegHalf: return 1.0 / std::sqrt(b);
    default: return std::pow(b, r);
  }
}

std::vector<double> prefix_means_power(double p, std::span<const double> x) {
  std::vector<double> m(x.size());
  if (p == 0.0) {
    NeumaierSum lsum;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lsum.add(std::log(x[i]));
      m[i] = std::exp(lsum.value() / static_cast<double>(i + 1));
    }
  } else {
    double log_s = -kInf;  // running log of sum x^p
    for (std::size_t i = 0; i < x.size(); ++i) {
      log_s = log_add_exp(log_s, p * std::log(x[i]));
      m[i] = std::exp((log_s - std::log(static_cast<double>(i + 1))) / p);
    }
  }
  return m;
}

// Inner exponent 0 factorizes: nu_ij = sqrt(x_i x_j), so the ordered pair
// sum is the square of a single running sum.
std::vector<double> prefix_means_mix_q0(double p, PairKind kind, std::span<const double> x) {
  std::vector<double> m(x.size());
  if (p == 0.0) {
    // Both mix kinds collapse to the plain geometric mean.
    return prefix_means_power(0.0, x);
  }
  double log_a = -kInf;  // log sum of x^(p/2)
  double log_d = -kInf;  // log sum of x^p (the diagonal)
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]);
    log_a = log_add_exp(log_a, 0.5 * p * lx);
    log_d = log_add_exp(log_d, p * lx);
    double n = static_cast<double>(i + 1);
    if (kind == PairKind::Square) {
      m[i] = std::exp((2.0 * log_a - 2.0 * std::log(n)) / p);
    } else if (i == 0) {
      m[i] = x[0];
    } else {
      // unordered off-diagonal sum (A^2 - D)/2, kept in log space
      double log_t = log_d + std::log(std::expm1(2.0 * log_a - log_d)) - std::numbers::ln2;
      m[i] = std::exp((log_t - std::log(n * (n - 1.0) / 2.0)) / p);
    }
  }
  return m;
}

// Incremental pair sweep shared by the power-power and general-inner mixes.
// term(k, i) returns the addend for the unordered pair k < i and diag(i) the
// diagonal addend: nu^p and x_i^p when p != 0, ln nu and ln x_i when p == 0.
template <class Term, class Diag>
std::vector<double> prefix_means_pair_sweep(double p, PairKind kind, std::size_t L, Term&& term,
                                            Diag&& diag, double x0) {
  std::vector<double> m(L);
  double inv_p = p == 0.0 ? 0.0 : 1.0 / p;
  NeumaierSum cross;   // sum over unordered pairs k < i
  NeumaierSum diag_s;  // sum over the diagonal
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t k = 0; k < i; ++k) cross.add(term(k, i));
    diag_s.add(diag(i));
    double n = static_cast<double>(i + 1);
    double c = cross.value(), d = diag_s.value();
    if (!std::isfinite(c) || !std::isfinite(d))
      throw EvalError("pair sum overflowed in the prefix sweep", p);
    if (kind == PairKind::Square) {
      double avg = (2.0 * c + d) / (n * n);
      m[i] = p == 0.0 ? std::exp(avg) : std::pow(avg, inv_p);
    } else if (i == 0) {
      m[i] = x0;
    } else {
      double avg = c / (n * (n - 1.0) / 2.0);
      m[i] = p == 0.0 ? std::exp(avg) : std::pow(avg, inv_p);
    }
  }
  return m;
}

std::vector<double> prefix_means_mix(double p, double q, PairKind kind,
                                     std::span<const double> x) {
  if (q == 0.0) return prefix_means_mix_q0(p, kind, x);
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::pow(x[i], q);
  if (p == 0.0) {
    double inv_q = 1.0 / q;  // ln nu = ln((c_k + c_i)/2) / q
    return prefix_means_pair_sweep(
        0.0, kind, x.size(),
        [&](std::size_t k, std::size_t i) { return inv_q * std::log(0.5 * (c[k] + c[i])); },
        [&](std::size_t i) { return std::log(x[i]); }, x[0]);
  }
  double r = p / q;  // nu^p = ((c_k + c_i)/2)^(p/q); the diagonal is c_i^(p/q)
  FastPow fp = classify_pow(r);
  return prefix_means_pair_sweep(
      p, kind, x.size(),
      [&](std::size_t k, std::size_t i) { return apply_pow(fp, r, 0.5 * (c[k] + c[i])); },
      [&](std::size_t i) { return apply_pow(fp, r, c[i]); }, x[0]);
}

std::vector<double> prefix_means_eval(const MeanExpr& e, std::span<const double> x) {
  std::vector<double> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = eval_mean(e, x.subspan(0, i + 1));
  return m;
}

}  // namespace

double gamma(double p) {
  if (p >= 1.0) return kInf;
  if (p == 0.0) return std::numbers::e;
  return std::pow(1.0 - p, -1.0 / p);
}

std::vector<double> prefix_means(const MeanExpr& e, std::span<const double> x) {
  if (x.empty()) throw DomainError("prefix_means needs a nonempty vector");
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("prefix_means values must be positive finite reals");
  }
  if (auto p = as_power(e)) return prefix_means_power(*p, x);
  if (auto mix = as_power_mix(e)) return prefix_means_mix(mix->p, mix->q, mix->kind, x);
  if (!e.is_power() && e.outer().is_power()) {
    PairKind kind = e.kind() == MeanExpr::Kind::Circ ? PairKind::Circ : PairKind::Square;
    double p = e.outer().exponent();
    MeanExpr inner = e.inner();
    if (p == 0.0) {
      return prefix_means_pair_sweep(
          0.0, kind, x.size(),
          [&](std::size_t k, std::size_t i) {
            double xy[2] = {x[k], x[i]};
            return std::log(eval_mean(inner, xy));
          },
          [&](std::size_t i) { return std::log(x[i]); }, x[0]);
    }
    return prefix_means_pair_sweep(
        p, kind, x.size(),
        [&](std::size_t k, std::size_t i) {
          double xy[2] = {x[k], x[i]};
          return std::pow(eval_mean(inner, xy), p);
        },
        [&](std::size_t i) { return std::pow(x[i], p); }, x[0]);
  }
  return prefix_means_eval(e, x);
}

HarmonicTail harmonic_lower_bound(const MeanExpr& e, long n_max, bool extrapolate) {
  if (n_max < 10) throw DomainError("harmonic lower bound needs n_max >= 10");

  bool fast = e.is_power() || as_power_mix(e).has_value();
  bool general_inner = !fast && !e.is_power() && e.outer().is_power();

  HarmonicTail out;
  std::vector<long> ns;        // indices where a_n is known
  std::vector<double> a_vals;  // a_n at those indices

  if (fast || general_inner) {
    long n_used = n_max;
    if (general_inner) n_used = std::min(n_used, 2000L);  // per-pair inner evals
    std::vector<double> x(static_cast<std::size_t>(n_used));
    for (long i = 0; i < n_used; ++i) x[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
    std::vector<double> m = prefix_means(e, x);
    ns.reserve(static_cast<std::size_t>(n_used));
    a_vals.reserve(static_cast<std::size_t>(n_used));
    for (long n = 1; n <= n_used; ++n) {
      ns.push_back(n);
      a_vals.push_back(static_cast<double>(n) * m[static_cast<std::size_t>(n - 1)]);
    }
    out.n_used = n_used;
  } else {
    // Composite outer mean: every evaluation pair-expands a pair sample, so
    // only a short geometric grid is affordable.
    for (long n : {8L, 12L, 16L, 24L, 32L, 48L}) {
      if (n > n_max) break;
      std::vector<double> x(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
      ns.push_back(n);
      a_vals.push_back(static_cast<double>(n) * eval_mean(e, x));
    }
    out.n_used = ns.back();
  }

  auto a_at = [&](long n) {
    auto it = std::lower_bound(ns.begin(), ns.end(), n);
    return a_vals[static_cast<std::size_t>(it - ns.begin())];
  };

  long N = out.n_used;
  std::size_t window_lo = 0;
  while (ns[window_lo] * 10 < N * 9) ++window_lo;  // tail window: n >= 0.9 N
  if (window_lo + 1 >= ns.size()) window_lo = ns.size() >= 2 ? ns.size() - 2 : 0;

  double raw = kInf;
  for (std::size_t i = window_lo; i < ns.size(); ++i) raw = std::min(raw, a_vals[i]);
  out.raw_tail_min = raw;

  // Aitken on a geometric index triple: convergence like n^(-s) has
  // geometrically decaying errors on n, 2n, 4n, which the update cancels.
  long n1 = std::max(2L, N / 4), n2 = std::max(3L, N / 2);
  double a1, a2, a3 = a_at(N);
  if (fast || general_inner) {
    a1 = a_at(n1);
    a2 = a_at(n2);
  } else {
    std::size_t sz = ns.size();
    if (sz < 3) {
      a1 = a2 = a3;
    } else {
      a1 = a_vals[sz - 3];
      a2 = a_vals[sz - 2];
      n1 = ns[sz - 3];
      n2 = ns[sz - 2];
    }
  }
  out.accelerated = aitken_extrapolate(a1, a2, a3);

  double d1 = a2 - a1, d2 = a3 - a2;
  out.diverging = std::abs(d2) > 1e-9 * std::max(1.0, std::abs(a3)) && d1 * d2 > 0.0 &&
                  std::abs(d2) >= 0.85 * std::abs(d1);

  out.estimate = (extrapolate && out.accelerated.has_value() && !out.diverging)
                     ? *out.accelerated
                     : raw;

  std::size_t window_n = ns.size() - window_lo;
  std::size_t stride = std::max<std::size_t>(1, window_n / 48);
  for (std::size_t i = window_lo; i < ns.size(); i += stride) out.tail.push_back({ns[i], a_vals[i]});
  if (out.tail.back().first != ns.back()) out.tail.push_back({ns.back(), a_vals.back()});
  return out;
}

namespace {

void softmax(std::span<const double> z, std::vector<double>& x) {
  double zmax = -kInf;
  for (double v : z) zmax = std::max(zmax, v);
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    x[i] = std::exp(z[i] - zmax);
    sum += x[i];
  }
  for (auto& v : x) v = std::max(v / sum, 1e-120);
}

}  // namespace

HardyNLower hardy_n_lower(const MeanExpr& e, int n, const OptimizerConfig& cfg,
                          std::span<const double> warm_start) {
  if (n < 1) throw DomainError("n must be positive");
  if (n > cfg.dimension_cap) throw DomainError("n exceeds the optimizer dimension cap");
  if (n == 1) return {1.0, {1.0}, false, 0};

  std::vector<double> x(static_cast<std::size_t>(n));
  auto negated_ratio = [&](std::span<const double> z) -> double {
    softmax(z, x);
    try {
      auto m = prefix_means(e, x);
      NeumaierSum s;
      for (double v : m) s.add(v);
      return -s.value();  // sum of x is 1 by construction
    } catch (const Error&) {
      return kInf;
    }
  };

  NelderMeadOptions nm;
  nm.max_iterations = cfg.iterations;
  nm.initial_step = cfg.simplex_scale;
  nm.f_tolerance = 1e-13;
  nm.x_tolerance = 1e-11;

  std::vector<std::vector<double>> starts;
  if (warm_start.size() == static_cast<std::size_t>(n)) {
    std::vector<double> z(warm_start.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = std::log(std::max(warm_start[i], 1e-30));
    starts.push_back(std::move(z));
  }
  starts.emplace_back(static_cast<std::size_t>(n), 0.0);
  for (double c : {0.3, 1.0, 3.0}) {
    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = -c * i;
    starts.push_back(std::move(z));
  }
  const double sigmas[3] = {0.5, 1.0, 2.0};
  for (std::size_t k = starts.size(); k < static_cast<std::size_t>(cfg.restarts); ++k) {
    std::mt19937_64 rng(stream_seed(cfg.seed, k));
    std::normal_distribution<double> gauss(0.0, sigmas[k % 3]);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (auto& v : z) v = gauss(rng);
    starts.push_back(std::move(z));
  }

  HardyNLower best{-kInf, {}, false, 0};
  std::vector<double> best_z;
  for (const auto& z0 : starts) {
    auto res = nelder_mead_minimize(negated_ratio, z0, nm);
    if (!std::isfinite(res.value)) {
      ++best.discarded_restarts;
      continue;
    }
    if (-res.value > best.value) {
      best.value = -res.value;
      best_z = res.x;
    }
  }
  if (best_z.empty()) throw EvalError("all optimizer restarts failed", std::nan(""));

  softmax(best_z, x);
  double total = 0.0;
  for (double v : x) total += v;
  best.maximizer.assign(x.begin(), x.end());
  for (auto& v : best.maximizer) v /= total;
  double min_coord = *std::min_element(best.maximizer.begin(), best.maximizer.end());
  best.boundary_suspected = min_coord < 1e-6;
  return best;
}

double superinvariant_upper_bound(const MeanExpr& e, int n) {
  if (n < 1) throw DomainError("n must be positive");
  // Equal weights cancel for weight-scaling invariant shapes; only circ
  // diagonals see the multiplicity, where (n-1)! enters. The cap keeps the
  // weight square representable; the induced diagonal-ratio error is ~2^-60.
  double w = 1.0;
  if (e.contains_circ()) {
    constexpr double cap = 1152921504606846976.0;  // 2^60
    for (int k = 1; k < n && w < cap; ++k) w = std::min(w * k, cap);
  }
  std::vector<SampleEntry> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) entries.push_back({1.0 / i, w});
  return n * eval_mean(e, WeightedSample(std::move(entries)));
}

double kaluza_szego_bound(double p, int n) {
  if (!(p >= 0.0) || !(p < 1.0)) throw DomainError("bound applies to 0 <= p < 1");
  if (n < 1) throw DomainError("n must be positive");
  return gamma(p) / (n * std::expm1(1.0 / n));
}

double hlp_bound(int n) {
  if (n < 1) throw DomainError("n must be positive");
  return std::pow(1.0 + 1.0 / n, n);
}

HardyMarginReport truncated_hardy_check(const MeanExpr& e, std::span<const double> x, double C) {
  std::vector<double> m = prefix_means(e, x);
  HardyMarginReport out;
  out.prefix_partial.resize(m.size());
  NeumaierSum ms, xs;
  for (std::size_t i = 0; i < m.size(); ++i) {
    ms.add(m[i]);
    xs.add(x[i]);
    out.prefix_partial[i] = ms.value();
  }
  out.sum_prefix_means = ms.value();
  out.sum_values = xs.value();
  out.margin = C * out.sum_values - out.sum_prefix_means;
  return out;
}

std::vector<std::vector<double>> seeded_l1_samples(std::uint64_t seed, int count) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
    std::uniform_int_distribution<int> len(40, 120);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int L = len(rng);
    double scale = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
    std::vector<double> x(static_cast<std::size_t>(L));
    if (s % 2 == 0) {
      double r = 0.3 + 0.6 * unit(rng);
      double v = scale;
      for (auto& xi : x) {
        xi = v;
        v *= r;
      }
    } else {
      double decay = 1.5 + 1.5 * unit(rng);
      for (int k = 0; k < L; ++k) x[static_cast<std::size_t>(k)] = scale * std::pow(k + 1, -decay);
    }
    out.push_back(std::move(x));
  }
  return out;
}

HardyBracket hardy_bracket(const MeanExpr& e, const BracketConfig& cfg) {
  HardyBracket out{e, harmonic_lower_bound(e, cfg.harmonic_n_max, cfg.extrapolate),
                   {}, {}, std::nullopt, std::nullopt, {}};
  if (out.harmonic.diverging) out.flags.push_back("diverging");

  int hn_max = cfg.hn_max;
  if (hn_max > cfg.optimizer.dimension_cap) {
    hn_max = cfg.optimizer.dimension_cap;
    out.flags.push_back("dimension cap reached");
  }

  bool boundary = false;
  std::vector<double> warm;
  for (int n = 1; n <= hn_max; ++n) {
    auto r = hardy_n_lower(e, n, cfg.optimizer,
                           warm.size() == static_cast<std::size_t>(n) ? std::span<const double>(warm)
                                                                      : std::span<const double>());
    boundary = boundary || r.boundary_suspected;
    out.lower_hn.push_back({n, r.value, r.maximizer});
    warm = r.maximizer;
    double tail = *std::min_element(warm.begin(), warm.end()) / 2.0;
    warm.push_back(tail);
    double total = 0.0;
    for (double v : warm) total += v;
    for (auto& v : warm) v /= total;
  }
  if (boundary) out.flags.push_back("supremum suspected on boundary");

  auto pw = as_power(e);
  auto mix = as_power_mix(e);
  bool theorem_applies = (pw && *pw <= 1.0) ||
                         (mix && mix->p <= 1.0 && mix->q <= 1.0 &&
                          (mix->kind == PairKind::Square || mix->p > mix->q));
  if (theorem_applies) {
    for (int n = 1; n <= hn_max; ++n)
      out.upper_theorem.push_back({n, superinvariant_upper_bound(e, n)});
  }

  if (pw) {
    out.gamma_reference = gamma(*pw);
    if (!std::isfinite(*out.gamma_reference)) out.flags.push_back("reference-infinite");
  }
  if (mix) {
    if (mix->p > 1.0 && mix->p < 2.0 && mix->q <= 0.0)
      out.flags.push_back("open-region estimate");
    if (mix->p <= 1.0 && mix->q <= 1.0) {
      if (!rho_finiteness(mix->p, mix->q)) {
        out.flags.push_back("reference-infinite");
      } else if (auto closed = rho_closed(mix->p, mix->q)) {
        out.rho_reference = *closed;
      } else {
        out.rho_reference = rho(mix->p, mix->q, cfg.rho_tol).value;
      }
    }
  }
  return out;
}

}  // namespace hardylab
