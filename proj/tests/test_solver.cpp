#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bisr/diagnostics.hpp"
#include "bisr/experiment.hpp"
#include "bisr/solver.hpp"
#include "test_support.hpp"

using bisr::Algorithm;
using bisr::BivariateParams;
using bisr::BivariatePenalty;
using bisr::ConvolutionFilter;
using bisr::Objective;
using bisr::PenaltyFamily;
using bisr::SolverConfig;

namespace {

// a small certified instance on the example1_like preset
Objective make_instance(std::size_t n, double sigma, std::uint64_t seed,
                        PenaltyFamily fam = PenaltyFamily::Atan) {
  const auto h = bisr::filter_preset("example1_like");
  bisr::ExperimentSpec spec;
  spec.n = n;
  spec.n_impulses = std::min<std::size_t>(10, std::max<std::size_t>(1, n / 5));
  spec.sigma = sigma;
  spec.seed = seed;
  bisr::Rng rng = bisr::Rng::for_trial(seed, 0);
  const auto x = bisr::gen_sparse_signal(spec, rng);
  auto y = bisr::add_awgn(bisr::apply(h, x), sigma, rng);
  const double lambda = bisr::lambda_rule(h, std::max(sigma, 1.0), spec.beta);
  const auto fit = bisr::fit_tridiag_bound(h);
  const auto a = bisr::params_from_tridiag(fit.bound, lambda);
  return Objective(h, std::move(y), lambda, BivariatePenalty{fam, a});
}

}  // namespace

TEST_CASE("theta value and gradient") {
  auto obj = make_instance(3, 1.0, 5);
  CHECK(bisr::theta_value(obj, std::vector<double>{0.0, 0.0, 0.0}) == 0.0);

  // direct summation oracle over the four zero-padded pairs
  auto rng = testutil::test_rng(89);
  const std::vector<double> x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                              rng.uniform(-3.0, 3.0)};
  const auto& bp = obj.penalty;
  const double expect = 0.5 * (bp.S(0.0, x[0]) + bp.S(x[0], x[1]) +
                               bp.S(x[1], x[2]) + bp.S(x[2], 0.0));
  CHECK(bisr::theta_value(obj, x) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(bisr::theta_value(obj, std::vector<double>{1.0}), std::domain_error);

  // a = (0,0) makes theta vanish
  Objective l1(obj.h, obj.y, obj.lambda,
               BivariatePenalty{PenaltyFamily::Atan, BivariateParams{0.0, 0.0}},
               Objective::Unchecked{});
  CHECK(bisr::theta_value(l1, x) == 0.0);
  for (double g : bisr::theta_grad(l1, x)) CHECK(g == 0.0);
}

TEST_CASE("theta gradient matches finite differences") {
  auto obj = make_instance(10, 1.0, 9);
  auto rng = testutil::test_rng(97);
  std::vector<double> x(10);
  for (auto& v : x) v = rng.uniform(-5.0, 5.0);
  const auto g = bisr::theta_grad(obj, x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto f = [&](double t) {
      std::vector<double> xt = x;
      xt[i] = t;
      return bisr::theta_value(obj, xt);
    };
    CHECK(std::fabs(g[i] - testutil::central_diff(f, x[i])) <= 1e-5);
  }
  const std::vector<double> zero(10, 0.0);
  for (double v : bisr::theta_grad(obj, zero)) CHECK(v == 0.0);
}

TEST_CASE("soft threshold") {
  CHECK(bisr::soft_threshold(5.0, 2.0) == 3.0);
  CHECK(bisr::soft_threshold(-1.5, 2.0) == 0.0);
  CHECK(bisr::soft_threshold(1.7, 0.0) == 1.7);
  CHECK(bisr::soft_threshold(-5.0, 2.0) == -3.0);
  CHECK_THROWS_AS(bisr::soft_threshold(1.0, -0.5), std::domain_error);
}

TEST_CASE("convexity certificate is enforced at construction") {
  const auto h = bisr::filter_preset("example1_like");
  const std::vector<double> y(12, 1.0);
  const auto fit = bisr::fit_tridiag_bound(h);
  const auto a = bisr::params_from_tridiag(fit.bound, 2.0);
  CHECK_NOTHROW(Objective(h, y, 2.0, BivariatePenalty{PenaltyFamily::Atan, a}));
  const BivariateParams too_big{2.0 * a.a1, a.a2};
  CHECK_THROWS_AS(Objective(h, y, 2.0, BivariatePenalty{PenaltyFamily::Atan, too_big}),
                  std::domain_error);
  // the unsafe escape hatch accepts anything
  CHECK_NOTHROW(Objective(h, y, 2.0, BivariatePenalty{PenaltyFamily::Atan, too_big},
                          Objective::Unchecked{}));
}

TEST_CASE("zero observation gives zero solution") {
  const auto h = bisr::filter_preset("example1_like");
  const auto fit = bisr::fit_tridiag_bound(h);
  const auto a = bisr::params_from_tridiag(fit.bound, 1.0);
  Objective obj(h, std::vector<double>(22, 0.0), 1.0,
                BivariatePenalty{PenaltyFamily::Atan, a});
  for (Algorithm alg : {Algorithm::FBS, Algorithm::MM}) {
    SolverConfig cfg;
    cfg.algorithm = alg;
    const auto r = bisr::solve(obj, cfg);
    CHECK(r.converged);
    for (double v : r.x_hat) CHECK(v == 0.0);
  }
}

TEST_CASE("objective trace is non-increasing") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto obj = make_instance(40, 2.0, seed);
    for (Algorithm alg : {Algorithm::FBS, Algorithm::MM}) {
      SolverConfig cfg;
      cfg.algorithm = alg;
      const auto r = bisr::solve(obj, cfg);
      CHECK(r.converged);
      for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-10);
    }
  }
}

TEST_CASE("l1 reduction: a = (0,0) reproduces a long-run lasso solve") {
  const auto h = bisr::filter_preset("example1_like");
  auto rng = testutil::test_rng(101);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> x(30, 0.0);
    for (int k = 0; k < 4; ++k) x[rng.uniform_int(30)] = rng.uniform(-10.0, 10.0);
    auto y = bisr::apply(h, x);
    for (auto& v : y) v += 0.3 * rng.normal();
    const double lambda = 0.8;

    Objective obj(h, y, lambda,
                  BivariatePenalty{PenaltyFamily::Atan, BivariateParams{0.0, 0.0}},
                  Objective::Unchecked{});
    SolverConfig cfg;
    cfg.stop_rel_tol = 1e-8;
    cfg.max_iter = 400000;
    const auto ours = bisr::solve_fbs(obj, cfg);

    // reference: plain ISTA on the lasso objective, run to a much
    // tighter tolerance
    SolverConfig tight;
    tight.stop_rel_tol = 1e-11;
    tight.max_iter = 2000000;
    const auto ref = bisr::solve_fbs(obj, tight);

    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      err = std::max(err, std::fabs(ours.x_hat[i] - ref.x_hat[i]));
    CHECK(err <= 1e-5 * std::max(1.0, bisr::detail::norm_inf(ref.x_hat)));
  }
}

TEST_CASE("MM with a = (0,0) agrees with FBS") {
  auto obj0 = make_instance(30, 1.0, 77);
  Objective obj(obj0.h, obj0.y, obj0.lambda,
                BivariatePenalty{PenaltyFamily::Atan, BivariateParams{0.0, 0.0}},
                Objective::Unchecked{});
  SolverConfig fbs, mm;
  fbs.stop_rel_tol = mm.stop_rel_tol = 1e-8;
  fbs.max_iter = mm.max_iter = 400000;
  mm.algorithm = Algorithm::MM;
  const auto a = bisr::solve(obj, fbs);
  const auto b = bisr::solve(obj, mm);
  double err = 0.0;
  for (std::size_t i = 0; i < a.x_hat.size(); ++i)
    err = std::max(err, std::fabs(a.x_hat[i] - b.x_hat[i]));
  CHECK(err <= 1e-5 * std::max(1.0, bisr::detail::norm_inf(a.x_hat)));
}

TEST_CASE("FBS and MM reach the same objective value") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto obj = make_instance(50, 3.0, 1000 + seed, PenaltyFamily::Atan);
    SolverConfig fbs, mm;
    fbs.stop_rel_tol = 1e-6;
    mm.algorithm = Algorithm::MM;
    mm.stop_rel_tol = 1e-6;
    const double fa = bisr::objective_value(obj, bisr::solve(obj, fbs).x_hat);
    const double fb = bisr::objective_value(obj, bisr::solve(obj, mm).x_hat);
    CHECK(std::fabs(fa - fb) <= 1e-6 * std::max(1.0, std::fabs(fa)));
  }
}

TEST_CASE("small strictly convex instance matches a coordinate-descent reference") {
  // N = 8, run a long coordinate grid search to convergence
  auto obj = make_instance(8, 1.0, 4242);
  SolverConfig cfg;
  cfg.stop_rel_tol = 1e-8;
  cfg.max_iter = 200000;
  const auto r = bisr::solve_fbs(obj, cfg);

  std::vector<double> x(8, 0.0);
  for (int sweep = 0; sweep < 3000; ++sweep) {
    for (std::size_t i = 0; i < 8; ++i) {
      // golden-section style shrink on coordinate i
      double lo = x[i] - 50.0, hi = x[i] + 50.0;
      for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        std::vector<double> t = x;
        t[i] = m1;
        const double f1 = bisr::objective_value(obj, t);
        t[i] = m2;
        const double f2 = bisr::objective_value(obj, t);
        if (f1 < f2)
          hi = m2;
        else
          lo = m1;
      }
      x[i] = 0.5 * (lo + hi);
      // snap near-zeros onto the kink
      std::vector<double> t = x;
      t[i] = 0.0;
      if (bisr::objective_value(obj, t) <= bisr::objective_value(obj, x)) x[i] = 0.0;
    }
  }
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(std::fabs(r.x_hat[i] - x[i]) <= 1e-4 * std::max(1.0, std::fabs(x[i])));
}

TEST_CASE("majorizer tangent bound of the objective") {
  auto obj = make_instance(12, 2.0, 31);
  auto rng = testutil::test_rng(103);
  auto fm = [&](const std::vector<double>& x, const std::vector<double>& v) {
    // F^M(x; v) = 1/2||y - Hx||^2 + lambda (Theta(v) + grad^T (x - v)) + lambda ||x||_1
    const auto hx = bisr::apply(obj.h, x);
    double fid = 0.0;
    for (std::size_t i = 0; i < hx.size(); ++i) {
      const double d = obj.y[i] - hx[i];
      fid += d * d;
    }
    const auto g = bisr::theta_grad(obj, v);
    double lin = bisr::theta_value(obj, v);
    for (std::size_t i = 0; i < x.size(); ++i) lin += g[i] * (x[i] - v[i]);
    double l1 = 0.0;
    for (double t : x) l1 += std::fabs(t);
    return 0.5 * fid + obj.lambda * lin + obj.lambda * l1;
  };
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x(12), v(12);
    for (auto& t : x) t = rng.uniform(-8.0, 8.0);
    for (auto& t : v) t = rng.uniform(-8.0, 8.0);
    CHECK(fm(x, v) >= bisr::objective_value(obj, x) - 1e-10);
    CHECK(fm(v, v) == doctest::Approx(bisr::objective_value(obj, v)).epsilon(1e-10));
  }
}

TEST_CASE("fixed point satisfies the optimality condition") {
  auto obj = make_instance(30, 2.0, 555);
  SolverConfig cfg;
  cfg.stop_rel_tol = 1e-10;
  cfg.max_iter = 500000;
  const auto r = bisr::solve_fbs(obj, cfg);
  CHECK(r.converged);
  CHECK(r.optimality_max_violation <= 1e-6);
}
