#pragma once

// Non-separable concave bivariate function S, the penalty
// psi(x) = S(x) + |x1| + |x2|, and their analytic derivatives.
// S is defined piecewise over four regions of the plane; it is C^2
// across the region boundaries, so any matching region gives the
// same value.

#include <array>
#include <cmath>
#include <stdexcept>

#include "bisr/penalty.hpp"

namespace bisr {

/// Parameters (a1, a2) of the bivariate penalty with the derived
/// quantities alpha = (a1+a2)/2 and r = (a1-a2)/(a1+a2).
struct BivariateParams {
  double a1 = 0.0;
  double a2 = 0.0;

  BivariateParams() = default;
  BivariateParams(double a1_, double a2_) : a1(a1_), a2(a2_) {
    if (!(a1 >= 0.0) || !(a2 >= 0.0) || !std::isfinite(a1) || !std::isfinite(a2))
      throw std::domain_error("BivariateParams: a1, a2 must be finite and >= 0");
  }

  double alpha() const { return 0.5 * (a1 + a2); }
  // r is 0/0 when a1 + a2 = 0; S is identically zero there and the
  // derived quantities are never used, but keep r well defined.
  double r() const { return a1 + a2 > 0.0 ? (a1 - a2) / (a1 + a2) : 0.0; }
  bool zero() const { return a1 == 0.0 && a2 == 0.0; }
};

enum class Region { A1, A2, A3, A4 };

/// First matching region in the fixed order A1, A2, A3, A4.
inline Region classify_region(double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2))
    throw std::domain_error("classify_region: non-finite input");
  if (x2 * (x1 - x2) >= 0.0) return Region::A1;
  if (x1 * (x1 - x2) <= 0.0) return Region::A2;
  if (x1 * (x1 + x2) <= 0.0) return Region::A3;
  return Region::A4;  // x2*(x1+x2) <= 0 holds whenever the others fail
}

/// Symmetric 2x2 matrix stored as three scalars.
struct Sym2 {
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;

  std::array<double, 2> eigenvalues() const {
    const double m = 0.5 * (h11 + h22);
    const double d = std::hypot(0.5 * (h11 - h22), h12);
    return {m - d, m + d};
  }
  double det() const { return h11 * h22 - h12 * h12; }
};

/// K(a) = (1/2) [[a1+a2, a1-a2], [a1-a2, a1+a2]].
inline Sym2 K_matrix(double a1, double a2) {
  return {0.5 * (a1 + a2), 0.5 * (a1 - a2), 0.5 * (a1 + a2)};
}

struct BivariatePenalty {
  PenaltyFamily family = PenaltyFamily::Atan;
  BivariateParams params;

  BivariatePenalty() = default;
  BivariatePenalty(PenaltyFamily f, BivariateParams p) : family(f), params(p) {}

  double S_in_region(double x1, double x2, Region reg) const {
    if (params.zero()) return 0.0;
    const double al = params.alpha();
    const double r = params.r();
    const SmoothedPenalty sa{family, al};
    const SmoothedPenalty s1{family, params.a1};
    const SmoothedPenalty s2{family, params.a2};
    switch (reg) {
      case Region::A1: return sa.value(x1 + r * x2) + (1.0 - r) * s1.value(x2);
      case Region::A2: return sa.value(r * x1 + x2) + (1.0 - r) * s1.value(x1);
      case Region::A3: return sa.value(r * x1 + x2) + (1.0 + r) * s2.value(x1);
      case Region::A4: return sa.value(x1 + r * x2) + (1.0 + r) * s2.value(x2);
    }
    return 0.0;
  }

  std::array<double, 2> grad_in_region(double x1, double x2, Region reg) const {
    if (params.zero()) return {0.0, 0.0};
    const double al = params.alpha();
    const double r = params.r();
    const SmoothedPenalty sa{family, al};
    const SmoothedPenalty s1{family, params.a1};
    const SmoothedPenalty s2{family, params.a2};
    switch (reg) {
      case Region::A1:
        return {sa.deriv1(x1 + r * x2),
                r * sa.deriv1(x1 + r * x2) + (1.0 - r) * s1.deriv1(x2)};
      case Region::A2:
        return {r * sa.deriv1(r * x1 + x2) + (1.0 - r) * s1.deriv1(x1),
                sa.deriv1(r * x1 + x2)};
      case Region::A3:
        return {r * sa.deriv1(r * x1 + x2) + (1.0 + r) * s2.deriv1(x1),
                sa.deriv1(r * x1 + x2)};
      case Region::A4:
        return {sa.deriv1(x1 + r * x2),
                r * sa.deriv1(x1 + r * x2) + (1.0 + r) * s2.deriv1(x2)};
    }
    return {0.0, 0.0};
  }

  Sym2 hessian_in_region(double x1, double x2, Region reg) const {
    if (params.zero()) return {};
    const double al = params.alpha();
    const double r = params.r();
    const SmoothedPenalty sa{family, al};
    const SmoothedPenalty s1{family, params.a1};
    const SmoothedPenalty s2{family, params.a2};
    switch (reg) {
      case Region::A1: {
        const double c = sa.deriv2(x1 + r * x2);
        return {c, r * c, r * r * c + (1.0 - r) * s1.deriv2(x2)};
      }
      case Region::A2: {
        const double c = sa.deriv2(r * x1 + x2);
        return {r * r * c + (1.0 - r) * s1.deriv2(x1), r * c, c};
      }
      case Region::A3: {
        const double c = sa.deriv2(r * x1 + x2);
        return {r * r * c + (1.0 + r) * s2.deriv2(x1), r * c, c};
      }
      case Region::A4: {
        const double c = sa.deriv2(x1 + r * x2);
        return {c, r * c, r * r * c + (1.0 + r) * s2.deriv2(x2)};
      }
    }
    return {};
  }

  double S(double x1, double x2) const {
    return S_in_region(x1, x2, classify_region(x1, x2));
  }
  std::array<double, 2> S_grad(double x1, double x2) const {
    return grad_in_region(x1, x2, classify_region(x1, x2));
  }
  Sym2 S_hessian(double x1, double x2) const {
    return hessian_in_region(x1, x2, classify_region(x1, x2));
  }

  double psi(double x1, double x2) const {
    return S(x1, x2) + std::fabs(x1) + std::fabs(x2);
  }
};

inline double S_value(const BivariatePenalty& bp, double x1, double x2) {
  return bp.S(x1, x2);
}
inline std::array<double, 2> S_grad(const BivariatePenalty& bp, double x1, double x2) {
  return bp.S_grad(x1, x2);
}
inline Sym2 S_hessian(const BivariatePenalty& bp, double x1, double x2) {
  return bp.S_hessian(x1, x2);
}
inline double psi_value(const BivariatePenalty& bp, double x1, double x2) {
  return bp.psi(x1, x2);
}

}  // namespace bisr
