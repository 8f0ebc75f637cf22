#pragma once

// Minimization of the deconvolution objective
//   F(x) = 1/2 ||y - Hx||^2 + lambda Theta(x; a) + lambda ||x||_1
// where Theta(x) = 1/2 sum_n S((x_{n-1}, x_n)) with x_0 = x_{N+1} = 0.
// Two algorithms: forward-backward splitting (iterative soft
// thresholding) and majorization-minimization via iterative l1
// minimization.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bisr/bivariate.hpp"
#include "bisr/convexity.hpp"
#include "bisr/linop.hpp"

namespace bisr {

/// Thrown when an iteration diverges (objective increases beyond slack).
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::string what, std::vector<double> trace)
      : std::runtime_error(std::move(what)), objective_trace(std::move(trace)) {}
  std::vector<double> objective_trace;
};

struct Objective {
  ConvolutionFilter h;
  std::vector<double> y;  // length n + filter length - 1
  double lambda = 1.0;
  BivariatePenalty penalty;
  std::size_t n = 0;

  struct Unchecked {};  // tag: skip the convexity certificate

  Objective(ConvolutionFilter h_, std::vector<double> y_, double lambda_,
            BivariatePenalty penalty_, Unchecked)
      : h(std::move(h_)), y(std::move(y_)), lambda(lambda_), penalty(penalty_) {
    if (!(lambda > 0.0)) throw std::domain_error("Objective: lambda must be > 0");
    if (y.size() < h.taps.size())
      throw std::domain_error("Objective: observation shorter than filter");
    n = y.size() - h.taps.size() + 1;
  }

  /// Checked constructor: rejects penalty parameters that fail the
  /// tridiagonal-bound convexity certificate.
  Objective(ConvolutionFilter h_, std::vector<double> y_, double lambda_,
            BivariatePenalty penalty_)
      : Objective(std::move(h_), std::move(y_), lambda_, penalty_, Unchecked{}) {
    const TridiagFit fit = fit_tridiag_bound(h);
    const double a1_max = std::max(0.0, (fit.bound.p0 + 2.0 * fit.bound.p1) / lambda);
    const double a2_max = std::max(0.0, (fit.bound.p0 - 2.0 * fit.bound.p1) / lambda);
    const double tol = 1e-9;
    if (penalty.params.a1 > a1_max * (1.0 + tol) + 1e-12 ||
        penalty.params.a2 > a2_max * (1.0 + tol) + 1e-12)
      throw std::domain_error(
          "Objective: penalty parameters fail the convexity certificate "
          "(a1 <= " + std::to_string(a1_max) + ", a2 <= " + std::to_string(a2_max) + ")");
    certified = true;
  }

  bool certified = false;
};

enum class Algorithm { FBS, MM };

struct SolverConfig {
  Algorithm algorithm = Algorithm::FBS;
  double mu_factor = 1.9;      // step = mu_factor / rho_hat, must be < 2
  double stop_rel_tol = 1e-4;  // ||x_{k+1} - x_k||_inf <= tol * ||x_k||_inf
  int max_iter = 20000;
  int inner_iter = 200;  // MM only
};

struct SolveResult {
  std::vector<double> x_hat;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  double optimality_max_violation = 0.0;
};

/// Theta(x) = 1/2 sum over the N+1 overlapping pairs, zero-padded ends.
inline double theta_value(const Objective& obj, std::span<const double> x) {
  if (x.size() != obj.n) throw std::domain_error("theta_value: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i <= obj.n; ++i) {
    const double prev = i > 0 ? x[i - 1] : 0.0;
    const double cur = i < obj.n ? x[i] : 0.0;
    acc += obj.penalty.S(prev, cur);
  }
  return 0.5 * acc;
}

/// [grad Theta]_n = 1/2 S1((x_n, x_{n+1})) + 1/2 S2((x_{n-1}, x_n)).
inline std::vector<double> theta_grad(const Objective& obj, std::span<const double> x) {
  if (x.size() != obj.n) throw std::domain_error("theta_grad: length mismatch");
  std::vector<double> g(obj.n, 0.0);
  for (std::size_t i = 0; i < obj.n; ++i) {
    const double nxt = i + 1 < obj.n ? x[i + 1] : 0.0;
    const double prv = i > 0 ? x[i - 1] : 0.0;
    g[i] = 0.5 * obj.penalty.S_grad(x[i], nxt)[0] +
           0.5 * obj.penalty.S_grad(prv, x[i])[1];
  }
  return g;
}

inline double soft_threshold(double t, double threshold) {
  if (!(threshold >= 0.0)) throw std::domain_error("soft_threshold: T must be >= 0");
  if (t > threshold) return t - threshold;
  if (t < -threshold) return t + threshold;
  return 0.0;
}

namespace detail {

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double t : v) m = std::max(m, std::fabs(t));
  return m;
}

// Extended-precision accumulation keeps trace rounding well below the
// 1e-10 monotonicity slack.
inline double objective_eval(const Objective& obj, std::span<const double> x) {
  const auto hx = convolve(obj.h, x);
  long double fid = 0.0L;
  for (std::size_t i = 0; i < hx.size(); ++i) {
    const long double d = static_cast<long double>(obj.y[i]) - hx[i];
    fid += d * d;
  }
  long double l1 = 0.0L;
  for (double t : x) l1 += std::fabs(t);
  return static_cast<double>(0.5L * fid +
                             static_cast<long double>(obj.lambda) *
                                 (theta_value(obj, x) + l1));
}

// Distance of the Theorem-6 optimality map to the sign set, per index.
inline std::vector<double> optimality_violations(const Objective& obj,
                                                 std::span<const double> x) {
  const auto hx = convolve(obj.h, x);
  std::vector<double> resid(hx.size());
  for (std::size_t i = 0; i < hx.size(); ++i) resid[i] = obj.y[i] - hx[i];
  const auto ht = convolve_adjoint(obj.h, resid);
  const auto gt = theta_grad(obj, x);
  std::vector<double> viol(obj.n);
  for (std::size_t i = 0; i < obj.n; ++i) {
    const double v = ht[i] / obj.lambda - gt[i];
    if (x[i] > 0.0)
      viol[i] = std::fabs(v - 1.0);
    else if (x[i] < 0.0)
      viol[i] = std::fabs(v + 1.0);
    else
      viol[i] = std::max(0.0, std::fabs(v) - 1.0);
  }
  return viol;
}

inline double max_violation(const Objective& obj, std::span<const double> x) {
  double m = 0.0;
  for (double v : optimality_violations(obj, x)) m = std::max(m, v);
  return m;
}

// The stopping rule divides by ||x_k||_inf; at the zero iterate fall
// back to an absolute test.
inline bool stop_reached(std::span<const double> x_new, std::span<const double> x_old,
                         double rel_tol) {
  double diff = 0.0;
  for (std::size_t i = 0; i < x_new.size(); ++i)
    diff = std::max(diff, std::fabs(x_new[i] - x_old[i]));
  const double base = norm_inf(x_old);
  if (base == 0.0) return norm_inf(x_new) <= 1e-12;
  return diff <= rel_tol * base;
}

}  // namespace detail

/// Forward-backward splitting: gradient step on the smooth part, then
/// soft thresholding.  Converges for mu < 2 / rho.
inline SolveResult solve_fbs(const Objective& obj, const SolverConfig& cfg = {}) {
  if (!(cfg.mu_factor > 0.0 && cfg.mu_factor < 2.0))
    throw std::domain_error("solve_fbs: mu_factor must lie in (0, 2)");
  const double rho = max_eig_upper_bound(obj.h);
  const double mu = cfg.mu_factor / rho;

  SolveResult res;
  std::vector<double> x(obj.n, 0.0);
  res.objective_trace.push_back(detail::objective_eval(obj, x));

  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto hx = convolve(obj.h, x);
    std::vector<double> resid(hx.size());
    for (std::size_t i = 0; i < hx.size(); ++i) resid[i] = obj.y[i] - hx[i];
    const auto ht = convolve_adjoint(obj.h, resid);
    const auto gt = theta_grad(obj, x);

    std::vector<double> x_new(obj.n);
    for (std::size_t i = 0; i < obj.n; ++i) {
      const double z = x[i] + mu * (ht[i] - obj.lambda * gt[i]);
      x_new[i] = soft_threshold(z, mu * obj.lambda);
    }

    const double f = detail::objective_eval(obj, x_new);
    if (f > res.objective_trace.back() + 1e-10)
      throw SolverFailure("solve_fbs: objective increased at iteration " +
                              std::to_string(k + 1),
                          std::move(res.objective_trace));
    res.objective_trace.push_back(f);
    const bool done = detail::stop_reached(x_new, x, cfg.stop_rel_tol);
    x = std::move(x_new);
    res.iterations = k + 1;
    if (done) {
      res.converged = true;
      break;
    }
  }

  res.optimality_max_violation = detail::max_violation(obj, x);
  res.x_hat = std::move(x);
  return res;
}

/// Majorization-minimization: each outer step linearizes Theta at the
/// current iterate and solves the resulting l1 problem with an inexact
/// warm-started proximal-gradient inner loop.
inline SolveResult solve_mm(const Objective& obj, const SolverConfig& cfg = {}) {
  if (!(cfg.mu_factor > 0.0 && cfg.mu_factor < 2.0))
    throw std::domain_error("solve_mm: mu_factor must lie in (0, 2)");
  if (cfg.inner_iter < 1) throw std::domain_error("solve_mm: inner_iter must be >= 1");
  const double rho = max_eig_upper_bound(obj.h);
  const double mu = cfg.mu_factor / rho;

  SolveResult res;
  std::vector<double> x(obj.n, 0.0);
  res.objective_trace.push_back(detail::objective_eval(obj, x));

  for (int k = 0; k < cfg.max_iter; ++k) {
    const auto d = theta_grad(obj, x);  // fixed linearization point

    // inner problem: min 1/2||y - Hx||^2 + lambda d^T x + lambda ||x||_1
    std::vector<double> z = x;  // warm start
    for (int j = 0; j < cfg.inner_iter; ++j) {
      const auto hz = convolve(obj.h, z);
      std::vector<double> resid(hz.size());
      for (std::size_t i = 0; i < hz.size(); ++i) resid[i] = obj.y[i] - hz[i];
      const auto ht = convolve_adjoint(obj.h, resid);
      std::vector<double> z_new(obj.n);
      for (std::size_t i = 0; i < obj.n; ++i) {
        const double step = z[i] + mu * (ht[i] - obj.lambda * d[i]);
        z_new[i] = soft_threshold(step, mu * obj.lambda);
      }
      const bool inner_done = detail::stop_reached(z_new, z, 1e-3 * cfg.stop_rel_tol);
      z = std::move(z_new);
      if (inner_done) break;
    }

    const double f = detail::objective_eval(obj, z);
    if (f > res.objective_trace.back() + 1e-10)
      throw SolverFailure("solve_mm: objective increased at outer iteration " +
                              std::to_string(k + 1),
                          std::move(res.objective_trace));
    res.objective_trace.push_back(f);
    const bool done = detail::stop_reached(z, x, cfg.stop_rel_tol);
    x = std::move(z);
    res.iterations = k + 1;
    if (done) {
      res.converged = true;
      break;
    }
  }

  res.optimality_max_violation = detail::max_violation(obj, x);
  res.x_hat = std::move(x);
  return res;
}

inline SolveResult solve(const Objective& obj, const SolverConfig& cfg = {}) {
  return cfg.algorithm == Algorithm::FBS ? solve_fbs(obj, cfg) : solve_mm(obj, cfg);
}

}  // namespace bisr
