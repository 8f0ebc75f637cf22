#pragma once

// Optimality certification for a prospective minimizer, objective
// evaluation (both algebraic forms), and RMSE.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bisr/solver.hpp"

namespace bisr {

/// Per-index data for the sign-condition scatter plot: x_n versus
/// v_n = (1/lambda)[H^T(y - Hx)]_n - [grad Theta(x)]_n.  A solution is
/// optimal iff every v_n lies in the sign set of x_n.
struct OptimalityReport {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> violation;  // distance of v_n to sign(x_n)
  double max_violation = 0.0;
  bool passed = false;
  double tol = 0.0;
  // When the objective was not certified convex, the condition is
  // necessary but not sufficient.
  bool certificate_warning = false;
};

inline OptimalityReport optimality_report(const Objective& obj,
                                          std::span<const double> x,
                                          double tol = 1e-3) {
  if (x.size() != obj.n) throw std::domain_error("optimality_report: length mismatch");
  if (!(tol > 0.0)) throw std::domain_error("optimality_report: tol must be > 0");

  OptimalityReport rep;
  rep.tol = tol;
  rep.certificate_warning = !obj.certified;
  rep.x.assign(x.begin(), x.end());

  const auto hx = convolve(obj.h, x);
  std::vector<double> resid(hx.size());
  for (std::size_t i = 0; i < hx.size(); ++i) resid[i] = obj.y[i] - hx[i];
  const auto ht = convolve_adjoint(obj.h, resid);
  const auto gt = theta_grad(obj, x);

  rep.v.resize(obj.n);
  rep.violation.resize(obj.n);
  for (std::size_t i = 0; i < obj.n; ++i) {
    const double v = ht[i] / obj.lambda - gt[i];
    rep.v[i] = v;
    if (x[i] > 0.0)
      rep.violation[i] = std::fabs(v - 1.0);
    else if (x[i] < 0.0)
      rep.violation[i] = std::fabs(v + 1.0);
    else
      rep.violation[i] = std::max(0.0, std::fabs(v) - 1.0);
    rep.max_violation = std::max(rep.max_violation, rep.violation[i]);
  }
  rep.passed = rep.max_violation <= tol;
  return rep;
}

/// F(x) = 1/2 ||y - Hx||^2 + lambda Theta(x) + lambda ||x||_1.
inline double objective_value(const Objective& obj, std::span<const double> x) {
  if (x.size() != obj.n) throw std::domain_error("objective_value: length mismatch");
  return detail::objective_eval(obj, x);
}

/// Same objective via the pairwise form
/// 1/2 ||y - Hx||^2 + (lambda/2) sum_n psi((x_{n-1}, x_n)).
inline double objective_value_pairwise(const Objective& obj, std::span<const double> x) {
  if (x.size() != obj.n) throw std::domain_error("objective_value_pairwise: length mismatch");
  const auto hx = convolve(obj.h, x);
  long double fid = 0.0L;
  for (std::size_t i = 0; i < hx.size(); ++i) {
    const long double d = static_cast<long double>(obj.y[i]) - hx[i];
    fid += d * d;
  }
  long double pen = 0.0L;
  for (std::size_t i = 0; i <= obj.n; ++i) {
    const double prev = i > 0 ? x[i - 1] : 0.0;
    const double cur = i < obj.n ? x[i] : 0.0;
    pen += obj.penalty.psi(prev, cur);
  }
  return static_cast<double>(0.5L * fid + 0.5L * obj.lambda * pen);
}

inline double rmse(std::span<const double> x_hat, std::span<const double> x_true) {
  if (x_hat.size() != x_true.size()) throw std::domain_error("rmse: length mismatch");
  if (x_hat.empty()) throw std::domain_error("rmse: empty input");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    const long double d = static_cast<long double>(x_hat[i]) - x_true[i];
    acc += d * d;
  }
  return std::sqrt(static_cast<double>(acc / x_hat.size()));
}

}  // namespace bisr
