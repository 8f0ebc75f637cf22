#pragma once

// Parameterized univariate sparsity penalties (rational, logarithmic,
// arctangent) and the smoothed concave part s(t; a) = phi(t; a) - |t|
// with its first and second derivatives.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bisr {

enum class PenaltyFamily { Rational, Log, Atan };

inline PenaltyFamily penalty_family_from_name(const std::string& name) {
  if (name == "rational") return PenaltyFamily::Rational;
  if (name == "log") return PenaltyFamily::Log;
  if (name == "atan") return PenaltyFamily::Atan;
  throw std::domain_error("unknown penalty family: " + name);
}

inline const char* penalty_family_name(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::Rational: return "rational";
    case PenaltyFamily::Log: return "log";
    case PenaltyFamily::Atan: return "atan";
  }
  return "?";
}

namespace detail {

inline void check_penalty_args(double t, double a) {
  if (!std::isfinite(t)) throw std::domain_error("penalty: t must be finite");
  if (!(a >= 0.0) || !std::isfinite(a))
    throw std::domain_error("penalty: a must be a finite nonnegative real");
}

// phi, phi', phi'' evaluated on u >= 0, a > 0.  The a = 0 branch
// (phi(t;0) = |t|) is handled by the callers so these closed forms
// never see a zero parameter.
inline double phi_pos(PenaltyFamily f, double u, double a) {
  if (u == 0.0) return 0.0;  // the atan form would leave rounding residue
  switch (f) {
    case PenaltyFamily::Rational:
      return u / (1.0 + 0.5 * a * u);
    case PenaltyFamily::Log:
      return std::log1p(a * u) / a;
    case PenaltyFamily::Atan: {
      const double sqrt3 = std::sqrt(3.0);
      return (2.0 / (a * sqrt3)) *
             (std::atan((1.0 + 2.0 * a * u) / sqrt3) - std::numbers::pi / 6.0);
    }
  }
  return 0.0;
}

inline double phi_d1_pos(PenaltyFamily f, double u, double a) {
  switch (f) {
    case PenaltyFamily::Rational: {
      const double d = 1.0 + 0.5 * a * u;
      return 1.0 / (d * d);
    }
    case PenaltyFamily::Log:
      return 1.0 / (1.0 + a * u);
    case PenaltyFamily::Atan: {
      const double w = 1.0 + 2.0 * a * u;
      return 4.0 / (3.0 + w * w);
    }
  }
  return 0.0;
}

inline double phi_d2_pos(PenaltyFamily f, double u, double a) {
  switch (f) {
    case PenaltyFamily::Rational: {
      const double d = 1.0 + 0.5 * a * u;
      return -a / (d * d * d);
    }
    case PenaltyFamily::Log: {
      const double d = 1.0 + a * u;
      return -a / (d * d);
    }
    case PenaltyFamily::Atan: {
      const double w = 1.0 + 2.0 * a * u;
      const double d = 3.0 + w * w;
      return -16.0 * a * w / (d * d);
    }
  }
  return 0.0;
}

}  // namespace detail

/// phi(t; a): even, concave on R+, phi(0) = 0, phi(t; 0) = |t|.
inline double phi(PenaltyFamily f, double t, double a) {
  detail::check_penalty_args(t, a);
  const double u = std::fabs(t);
  if (a == 0.0) return u;
  return detail::phi_pos(f, u, a);
}

/// Smoothed concave part s(t; a) = phi(t; a) - |t| with analytic derivatives.
struct SmoothedPenalty {
  PenaltyFamily family = PenaltyFamily::Atan;
  double a = 0.0;

  double value(double t) const {
    detail::check_penalty_args(t, a);
    if (a == 0.0) return 0.0;
    const double u = std::fabs(t);
    return detail::phi_pos(family, u, a) - u;
  }

  // s'(0) = 0; odd in t.
  double deriv1(double t) const {
    detail::check_penalty_args(t, a);
    if (a == 0.0 || t == 0.0) return 0.0;
    const double u = std::fabs(t);
    const double d = detail::phi_d1_pos(family, u, a) - 1.0;
    return t > 0.0 ? d : -d;
  }

  // s''(0) = -a; even in t; -a <= s'' <= 0 everywhere.
  double deriv2(double t) const {
    detail::check_penalty_args(t, a);
    if (a == 0.0) return 0.0;
    if (t == 0.0) return -a;
    return detail::phi_d2_pos(family, std::fabs(t), a);
  }
};

inline double s_value(const SmoothedPenalty& sp, double t) { return sp.value(t); }
inline double s_deriv1(const SmoothedPenalty& sp, double t) { return sp.deriv1(t); }
inline double s_deriv2(const SmoothedPenalty& sp, double t) { return sp.deriv2(t); }

}  // namespace bisr
