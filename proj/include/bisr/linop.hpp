#pragma once

// Finite convolution (Toeplitz) operator: forward and adjoint apply,
// frequency response, and a sound upper bound on the largest
// eigenvalue of H^T H.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace bisr {

struct ConvolutionFilter {
  std::vector<double> taps;

  ConvolutionFilter() = default;
  explicit ConvolutionFilter(std::vector<double> t) : taps(std::move(t)) {
    bool any = false;
    for (double v : taps) {
      if (!std::isfinite(v)) throw std::domain_error("ConvolutionFilter: non-finite tap");
      if (v != 0.0) any = true;
    }
    if (taps.empty() || !any)
      throw std::domain_error("ConvolutionFilter: need at least one nonzero tap");
  }

  std::size_t length() const { return taps.size(); }

  double norm2() const {
    double s = 0.0;
    for (double v : taps) s += v * v;
    return std::sqrt(s);
  }
};

/// Full linear convolution, output length N + L - 1.
inline std::vector<double> convolve(const ConvolutionFilter& h,
                                    std::span<const double> x) {
  if (x.empty()) throw std::domain_error("convolve: empty input");
  const std::size_t n = x.size(), l = h.taps.size();
  std::vector<double> y(n + l - 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    for (std::size_t k = 0; k < l; ++k) y[j + k] += h.taps[k] * xj;
  }
  return y;
}

/// Adjoint of convolve (correlation); input length N + L - 1, output length N.
inline std::vector<double> convolve_adjoint(const ConvolutionFilter& h,
                                            std::span<const double> y) {
  const std::size_t l = h.taps.size();
  if (y.size() < l) throw std::domain_error("convolve_adjoint: input shorter than filter");
  const std::size_t n = y.size() - l + 1;
  std::vector<double> x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < l; ++k) s += h.taps[k] * y[j + k];
    x[j] = s;
  }
  return x;
}

// spelled-out names avoid any chance of an unqualified call drifting
// to std::apply through argument-dependent lookup; these aliases keep
// the natural operator vocabulary available
inline std::vector<double> apply(const ConvolutionFilter& h, std::span<const double> x) {
  return convolve(h, x);
}
inline std::vector<double> apply_adjoint(const ConvolutionFilter& h,
                                         std::span<const double> y) {
  return convolve_adjoint(h, y);
}

/// |H(omega)|^2 where H(omega) = sum_n h_n e^{-j omega n}.
inline double freq_response_sq(const ConvolutionFilter& h, double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t n = 0; n < h.taps.size(); ++n) {
    re += h.taps[n] * std::cos(omega * static_cast<double>(n));
    im -= h.taps[n] * std::sin(omega * static_cast<double>(n));
  }
  return re * re + im * im;
}

/// Upper bound on the maximum eigenvalue of H^T H: the grid maximum of
/// |H(omega)|^2 inflated by a small factor.  Any finite H^T H is a
/// principal submatrix of the doubly-infinite Toeplitz operator whose
/// spectrum is bounded by max |H(omega)|^2, so the bound is sound.
inline double max_eig_upper_bound(const ConvolutionFilter& h, int grid_size = 4096) {
  if (grid_size < 1024) throw std::domain_error("max_eig_upper_bound: grid_size >= 1024");
  const double pi = 3.14159265358979323846;
  double m = 0.0;
  for (int k = 0; k <= grid_size; ++k)
    m = std::max(m, freq_response_sq(h, pi * k / grid_size));
  if (m <= 0.0) throw std::domain_error("max_eig_upper_bound: zero filter");
  return m * (1.0 + 1e-6);
}

}  // namespace bisr
