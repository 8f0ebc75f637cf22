#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "bisr/experiment.hpp"
#include "test_support.hpp"

using bisr::ConvolutionFilter;
using bisr::ExperimentSpec;
using bisr::Rng;

TEST_CASE("filter presets") {
  const auto h1 = bisr::filter_preset("example1_like");
  CHECK(h1.taps == std::vector<double>{0.1, 0.66, 0.1});
  const auto h2 = bisr::filter_preset("example2_null");
  CHECK(h2.taps == std::vector<double>{0.45, 0.45});
  CHECK(bisr::freq_response_sq(h2, std::numbers::pi) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(bisr::filter_preset("nope"), std::domain_error);
}

TEST_CASE("sparse signal generation") {
  ExperimentSpec spec;
  spec.n = 100;
  spec.n_impulses = 10;
  Rng rng = Rng::for_trial(1, 0);
  const auto x = bisr::gen_sparse_signal(spec, rng);
  REQUIRE(x.size() == 100);
  std::size_t nnz = 0;
  for (double v : x)
    if (v != 0.0) {
      ++nnz;
      CHECK(std::fabs(v) <= 100.0);
    }
  CHECK(nnz == 10);

  // identical stream gives identical output; different trial differs
  Rng rng2 = Rng::for_trial(1, 0);
  CHECK(bisr::gen_sparse_signal(spec, rng2) == x);
  Rng rng3 = Rng::for_trial(1, 1);
  CHECK(bisr::gen_sparse_signal(spec, rng3) != x);

  spec.n_impulses = 101;
  CHECK_THROWS_AS(bisr::gen_sparse_signal(spec, rng), std::domain_error);
}

TEST_CASE("all positions can be hit") {
  ExperimentSpec spec;
  spec.n = 12;
  spec.n_impulses = 3;
  std::set<std::size_t> seen;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng = Rng::for_trial(9, t);
    const auto x = bisr::gen_sparse_signal(spec, rng);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) seen.insert(i);
  }
  CHECK(seen.size() == 12);
}

TEST_CASE("awgn statistics") {
  Rng rng = Rng::for_trial(2, 0);
  const std::vector<double> zero(200000, 0.0);
  const auto noisy = bisr::add_awgn(zero, 4.0, rng);
  long double mean = 0.0L, var = 0.0L;
  for (double v : noisy) mean += v;
  mean /= noisy.size();
  for (double v : noisy) var += (v - mean) * (v - mean);
  var /= noisy.size();
  CHECK(static_cast<double>(mean) == doctest::Approx(0.0).scale(1.0).epsilon(0.05));
  CHECK(std::sqrt(static_cast<double>(var)) == doctest::Approx(4.0).epsilon(0.02));

  const auto same = bisr::add_awgn(std::vector<double>{1.0, 2.0}, 0.0, rng);
  CHECK(same == std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(bisr::add_awgn(zero, -1.0, rng), std::domain_error);
}

TEST_CASE("lambda rule") {
  const ConvolutionFilter h({3.0, 4.0});
  CHECK(bisr::lambda_rule(h, 2.0, 2.5) == doctest::Approx(25.0));
  CHECK_THROWS_AS(bisr::lambda_rule(h, 0.0, 2.5), std::domain_error);
  CHECK_THROWS_AS(bisr::lambda_rule(h, 1.0, 0.0), std::domain_error);
}

TEST_CASE("debias recovers exact amplitudes from noiseless data") {
  const auto h = bisr::filter_preset("example1_like");
  std::vector<double> x_true(30, 0.0);
  x_true[4] = 7.0;
  x_true[13] = -3.0;
  x_true[22] = 11.0;
  const auto y = bisr::apply(h, x_true);

  // shrunken support estimate: right support, wrong amplitudes
  auto x_hat = x_true;
  for (auto& v : x_hat) v *= 0.6;
  const auto res = bisr::debias(h, y, x_hat);
  REQUIRE(res.ok);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(res.x[i] == doctest::Approx(x_true[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("debias residual is orthogonal to the support columns") {
  const auto h = bisr::filter_preset("example1_like");
  auto rng = testutil::test_rng(113);
  std::vector<double> x_hat(25, 0.0);
  for (int k = 0; k < 5; ++k) x_hat[rng.uniform_int(25)] = rng.uniform(-5.0, 5.0);
  std::vector<double> y(25 + h.taps.size() - 1);
  for (auto& v : y) v = rng.uniform(-5.0, 5.0);

  const auto res = bisr::debias(h, y, x_hat);
  REQUIRE(res.ok);
  const auto hx = bisr::apply(h, res.x);
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - hx[i];
  const auto htr = bisr::apply_adjoint(h, r);
  for (std::size_t i = 0; i < 25; ++i)
    if (x_hat[i] != 0.0) CHECK(std::fabs(htr[i]) <= 1e-9);
}

TEST_CASE("debias edge cases") {
  const auto h = bisr::filter_preset("example1_like");
  const std::vector<double> zero(10, 0.0);
  const auto empty = bisr::debias(h, std::vector<double>(12, 1.0), zero);
  CHECK_FALSE(empty.ok);
  CHECK(empty.x == zero);
  CHECK_THROWS_AS(bisr::debias(h, std::vector<double>(5, 1.0), zero), std::domain_error);
}

TEST_CASE("l1 baseline equals an unregularized-theta solve") {
  const auto h = bisr::filter_preset("example1_like");
  bisr::Rng rng = Rng::for_trial(3, 0);
  std::vector<double> y(42);
  for (auto& v : y) v = rng.uniform(-10.0, 10.0);
  const auto r = bisr::solve_l1_baseline(h, y, 2.0);
  CHECK(r.converged);
  CHECK(bisr::optimality_report(
            bisr::Objective(h, y, 2.0,
                            bisr::BivariatePenalty{bisr::PenaltyFamily::Atan,
                                                   bisr::BivariateParams{0.0, 0.0}},
                            bisr::Objective::Unchecked{}),
            r.x_hat, 1e-2)
            .max_violation <= 1e-2);
}

TEST_CASE("sweep: determinism and method ordering") {
  ExperimentSpec spec;
  spec.n = 40;
  spec.n_impulses = 4;
  spec.trials = 4;
  spec.seed = 7;
  const std::vector<double> sigmas{2.0, 4.0};

  const auto a = bisr::run_sweep(spec, sigmas);
  const auto b = bisr::run_sweep(spec, sigmas);
  const auto methods = bisr::sweep_methods();
  REQUIRE(a.rows.size() == sigmas.size() * methods.size());
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].sigma == b.rows[i].sigma);
    CHECK(a.rows[i].method == methods[i % methods.size()]);
    CHECK(a.rows[i].method == b.rows[i].method);
    // RMSE must be bit-identical across runs despite concurrency
    CHECK(a.rows[i].mean_rmse == b.rows[i].mean_rmse);
    CHECK(a.rows[i].mean_rmse >= 0.0);
  }
}

TEST_CASE("sweep: sparsity-promoting methods beat plain l1 at high noise") {
  ExperimentSpec spec;
  spec.n = 60;
  spec.n_impulses = 6;
  spec.trials = 8;
  spec.seed = 11;
  const auto rep = bisr::run_sweep(spec, {4.0});
  double l1 = -1.0, atan_rmse = -1.0;
  for (const auto& row : rep.rows) {
    if (row.method == "L1") l1 = row.mean_rmse;
    if (row.method == "BISR(atan)") atan_rmse = row.mean_rmse;
  }
  REQUIRE(l1 > 0.0);
  REQUIRE(atan_rmse > 0.0);
  CHECK(atan_rmse < l1);
}
