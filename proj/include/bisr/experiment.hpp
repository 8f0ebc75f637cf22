#pragma once

// Experiment harness: sparse test-signal generation, noise, the lambda
// rule, filter presets, the l1 baseline with optional debiasing, and
// the noise-sweep protocol (per-sigma mean RMSE over seeded trials).

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bisr/convexity.hpp"
#include "bisr/diagnostics.hpp"
#include "bisr/linop.hpp"
#include "bisr/rng.hpp"
#include "bisr/solver.hpp"

namespace bisr {

struct ExperimentSpec {
  std::size_t n = 100;
  std::size_t n_impulses = 10;
  double amp_lo = -100.0;
  double amp_hi = 100.0;
  double sigma = 4.0;
  double beta = 2.5;
  int trials = 50;
  std::uint64_t seed = 1;
  std::string filter_preset = "example1_like";
  PenaltyFamily family = PenaltyFamily::Atan;
  Algorithm algorithm = Algorithm::FBS;
};

// Filter presets standing in for the paper-style test filters (whose
// exact taps are not published).
//
//   example1_like: short lowpass [0.1, 0.66, 0.1].  Its squared
//     response 0.4756 + 0.264 cos(w) + 0.02 cos(2w) dominates
//     0.4 + 0.2 cos(w), so that tridiagonal bound (and a slightly
//     larger fitted one) is feasible.
//   example2_null: averaging filter [0.45, 0.45] = 0.45 (1 + z^-1),
//     H(pi) = 0 exactly; 0.38 (1 + cos w) is a feasible bound and any
//     feasible bound has P(pi) = 0.
inline ConvolutionFilter filter_preset(const std::string& name) {
  if (name == "example1_like") return ConvolutionFilter({0.1, 0.66, 0.1});
  if (name == "example2_null") return ConvolutionFilter({0.45, 0.45});
  throw std::domain_error("unknown filter preset: " + name);
}

/// k impulses at distinct uniform positions, amplitudes uniform on
/// [amp_lo, amp_hi], zeros elsewhere.
inline std::vector<double> gen_sparse_signal(const ExperimentSpec& spec, Rng& rng) {
  if (spec.n_impulses > spec.n)
    throw std::domain_error("gen_sparse_signal: more impulses than samples");
  std::vector<double> x(spec.n, 0.0);
  // partial Fisher-Yates over the index set
  std::vector<std::size_t> idx(spec.n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.n_impulses; ++i) {
    const std::size_t j = i + rng.uniform_int(spec.n - i);
    std::swap(idx[i], idx[j]);
    x[idx[i]] = rng.uniform(spec.amp_lo, spec.amp_hi);
  }
  return x;
}

inline std::vector<double> add_awgn(std::span<const double> y, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::domain_error("add_awgn: sigma must be >= 0");
  std::vector<double> out(y.begin(), y.end());
  if (sigma == 0.0) return out;
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

/// lambda = beta * sigma * ||h||_2.
inline double lambda_rule(const ConvolutionFilter& h, double sigma, double beta) {
  if (!(sigma > 0.0) || !(beta > 0.0))
    throw std::domain_error("lambda_rule: sigma and beta must be > 0");
  return beta * sigma * h.norm2();
}

/// The l1 baseline is the same FBS solve with a = (0, 0).
inline SolveResult solve_l1_baseline(const ConvolutionFilter& h,
                                     std::vector<double> y, double lambda,
                                     const SolverConfig& cfg = {}) {
  Objective obj(h, std::move(y), lambda,
                BivariatePenalty{PenaltyFamily::Atan, BivariateParams{0.0, 0.0}},
                Objective::Unchecked{});
  obj.certified = true;  // l1 objective is always convex
  return solve_fbs(obj, cfg);
}

struct DebiasResult {
  std::vector<double> x;
  bool ok = false;  // false: empty or rank-deficient support, x unchanged/zero
};

/// Least-squares refit of the amplitudes on the support of x_hat
/// (normal equations with Cholesky on the restricted system).
inline DebiasResult debias(const ConvolutionFilter& h, std::span<const double> y,
                           std::span<const double> x_hat) {
  const std::size_t n = x_hat.size();
  const std::size_t l = h.taps.size(), rows = n + l - 1;
  if (y.size() != rows) throw std::domain_error("debias: length mismatch");

  std::vector<std::size_t> supp;
  for (std::size_t i = 0; i < n; ++i)
    if (x_hat[i] != 0.0) supp.push_back(i);

  DebiasResult res;
  if (supp.empty()) {
    res.x.assign(n, 0.0);
    return res;
  }

  const std::size_t m = supp.size();

  // columns of H restricted to the support
  auto col = [&](std::size_t j, std::size_t row) -> double {
    const std::size_t c = supp[j];
    return (row >= c && row - c < l) ? h.taps[row - c] : 0.0;
  };

  // normal equations A = Hs^T Hs, b = Hs^T y
  std::vector<double> A(m * m, 0.0), b(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (std::size_t row = 0; row < rows; ++row) s += col(i, row) * col(j, row);
      A[i * m + j] = A[j * m + i] = s;
    }
    double s = 0.0;
    for (std::size_t row = 0; row < rows; ++row) s += col(i, row) * y[row];
    b[i] = s;
  }

  // Cholesky; bail out on rank deficiency
  std::vector<double> L(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
      if (i == j) {
        if (s <= 1e-12 * std::max(1.0, A[i * m + i])) {
          res.x.assign(x_hat.begin(), x_hat.end());
          return res;
        }
        L[i * m + i] = std::sqrt(s);
      } else {
        L[i * m + j] = s / L[j * m + j];
      }
    }
  }
  // forward/back substitution
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= L[i * m + k] * z[k];
    z[i] = s / L[i * m + i];
  }
  std::vector<double> w(m);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= L[k * m + ii] * w[k];
    w[ii] = s / L[ii * m + ii];
  }

  res.x.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) res.x[supp[j]] = w[j];
  res.ok = true;
  return res;
}

struct SweepRow {
  double sigma = 0.0;
  std::string method;
  double mean_rmse = 0.0;
  double mean_ms = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

namespace detail {

struct TrialResult {
  std::vector<double> rmse_by_method;
  std::vector<double> ms_by_method;
};

}  // namespace detail

/// Methods evaluated by run_sweep, in row order.
inline std::vector<std::string> sweep_methods() {
  return {"L1", "L1+debias", "BISR(rational)", "BISR(log)", "BISR(atan)"};
}

/// Runs the noise-sweep protocol: for each sigma, `trials` seeded
/// instances solved by every method; reports per-method mean RMSE and
/// mean wall time.  Trials execute concurrently, each with its own RNG
/// stream; aggregation is an order-independent per-trial sum.
inline SweepReport run_sweep(const ExperimentSpec& base,
                             const std::vector<double>& sigmas) {
  const ConvolutionFilter h = filter_preset(base.filter_preset);
  const TridiagFit fit = fit_tridiag_bound(h);
  const auto methods = sweep_methods();
  const std::array<PenaltyFamily, 3> families = {
      PenaltyFamily::Rational, PenaltyFamily::Log, PenaltyFamily::Atan};

  auto run_trial = [&](double sigma, std::uint64_t trial) -> detail::TrialResult {
    ExperimentSpec spec = base;
    spec.sigma = sigma;
    Rng rng = Rng::for_trial(base.seed, trial);
    const auto x_true = gen_sparse_signal(spec, rng);
    const auto clean = convolve(h, x_true);
    auto y = add_awgn(clean, sigma, rng);
    const double lambda = lambda_rule(h, sigma, base.beta);

    detail::TrialResult tr;
    auto timed = [&](auto&& fn) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<double> x = fn();
      const auto t1 = std::chrono::steady_clock::now();
      tr.rmse_by_method.push_back(rmse(x, x_true));
      tr.ms_by_method.push_back(
          std::chrono::duration<double, std::milli>(t1 - t0).count());
      return x;
    };

    SolverConfig cfg;
    cfg.algorithm = base.algorithm;
    const auto l1 = timed([&] { return solve_l1_baseline(h, y, lambda, cfg).x_hat; });
    timed([&] { return debias(h, y, l1).x; });
    for (PenaltyFamily fam : families) {
      timed([&] {
        const BivariateParams a = params_from_tridiag(fit.bound, lambda);
        Objective obj(h, y, lambda, BivariatePenalty{fam, a});
        const SolveResult r = solve(obj, cfg);
        const auto rep = optimality_report(obj, r.x_hat, 1e-3);
        if (!rep.passed)
          throw SolverFailure("sweep: BISR solution failed the optimality "
                              "certificate (max violation " +
                                  std::to_string(rep.max_violation) + ")",
                              r.objective_trace);
        return r.x_hat;
      });
    }
    return tr;
  };

  SweepReport report;
  for (double sigma : sigmas) {
    std::vector<detail::TrialResult> results(base.trials);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(base.trials)));
    std::atomic<int> next{0};
    std::vector<std::future<void>> tasks;
    std::mutex err_mutex;
    std::exception_ptr first_error;
    for (unsigned w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          const int t = next.fetch_add(1);
          if (t >= base.trials) return;
          try {
            results[t] = run_trial(sigma, static_cast<std::uint64_t>(t));
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      }));
    }
    for (auto& t : tasks) t.get();
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      SweepRow row;
      row.sigma = sigma;
      row.method = methods[m];
      for (const auto& tr : results) {
        row.mean_rmse += tr.rmse_by_method[m];
        row.mean_ms += tr.ms_by_method[m];
      }
      row.mean_rmse /= base.trials;
      row.mean_ms /= base.trials;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace bisr
