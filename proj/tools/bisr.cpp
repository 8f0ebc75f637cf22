// Command-line front end: demo instances, single deconvolution solves,
// convexity certification, noise sweeps, and optimality reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bisr/bisr.hpp"

namespace {

using json = nlohmann::json;

// --filter accepts a preset name, an inline comma list "0.1,0.66,0.1",
// or a CSV path
bisr::ConvolutionFilter parse_filter(const std::string& arg) {
  if (arg == "example1_like" || arg == "example2_null") return bisr::filter_preset(arg);
  if (arg.find(',') != std::string::npos) {
    std::vector<double> taps;
    std::istringstream ss(arg);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        taps.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::domain_error("bad tap value: '" + cell + "'");
      }
    }
    return bisr::ConvolutionFilter(taps);
  }
  return bisr::ConvolutionFilter(bisr::read_value_column(arg));
}

bisr::Algorithm parse_algorithm(const std::string& name) {
  if (name == "fbs") return bisr::Algorithm::FBS;
  if (name == "mm") return bisr::Algorithm::MM;
  throw std::domain_error("unknown algorithm: " + name + " (want fbs|mm)");
}

void print_solution(const bisr::SolveResult& r, const std::string& out_path) {
  if (!out_path.empty()) {
    bisr::write_signal_csv(out_path, r.x_hat);
    std::cout << "wrote " << out_path << "\n";
  } else {
    std::cout << "index,value\n";
    for (std::size_t i = 0; i < r.x_hat.size(); ++i)
      std::cout << i + 1 << ',' << bisr::format_double(r.x_hat[i]) << '\n';
  }
  std::cout << "iterations " << r.iterations << (r.converged ? "" : " (not converged)")
            << "\nfinal objective "
            << bisr::format_double(r.objective_trace.back()) << "\nmax sign-condition violation "
            << bisr::format_double(r.optimality_max_violation) << "\n";
}

int run_demo(int example, std::uint64_t seed, const std::string& algorithm) {
  bisr::ExperimentSpec spec;
  spec.seed = seed;
  spec.algorithm = parse_algorithm(algorithm);
  spec.filter_preset = example == 1 ? "example1_like" : "example2_null";
  const auto h = bisr::filter_preset(spec.filter_preset);

  bisr::Rng rng = bisr::Rng::for_trial(spec.seed, 0);
  const auto x_true = bisr::gen_sparse_signal(spec, rng);
  const auto y = bisr::add_awgn(bisr::apply(h, x_true), spec.sigma, rng);
  const double lambda = bisr::lambda_rule(h, spec.sigma, spec.beta);

  const auto fit = bisr::fit_tridiag_bound(h);
  const auto a = bisr::params_from_tridiag(fit.bound, lambda);

  std::cout << "demo example " << example << " (filter " << spec.filter_preset
            << ", n " << spec.n << ", sigma " << bisr::format_double(spec.sigma)
            << ", lambda " << bisr::format_double(lambda) << ")\n"
            << "certified penalty parameters a1 " << bisr::format_double(a.a1)
            << " a2 " << bisr::format_double(a.a2) << "\n";

  bisr::SolverConfig cfg;
  cfg.algorithm = spec.algorithm;
  const auto l1 = bisr::solve_l1_baseline(h, y, lambda, cfg);
  const auto deb = bisr::debias(h, y, l1.x_hat);
  std::cout << "L1             rmse " << bisr::format_double(bisr::rmse(l1.x_hat, x_true))
            << "\nL1+debias      rmse " << bisr::format_double(bisr::rmse(deb.x, x_true))
            << "\n";
  for (auto fam : {bisr::PenaltyFamily::Rational, bisr::PenaltyFamily::Log,
                   bisr::PenaltyFamily::Atan}) {
    bisr::Objective obj(h, y, lambda, bisr::BivariatePenalty{fam, a});
    const auto r = bisr::solve(obj, cfg);
    const auto rep = bisr::optimality_report(obj, r.x_hat);
    std::string label = std::string("BISR(") + bisr::penalty_family_name(fam) + ")";
    label.resize(15, ' ');
    std::cout << label
              << "rmse " << bisr::format_double(bisr::rmse(r.x_hat, x_true))
              << "  iters " << r.iterations << "  certificate "
              << (rep.passed ? "pass" : "FAIL") << "\n";
  }
  return 0;
}

int run_deconv(const std::string& input, const std::string& filter, double lambda,
               double a1, double a2, bool auto_params, const std::string& family,
               const std::string& algorithm, bool unsafe, const std::string& out) {
  const auto h = parse_filter(filter);
  auto y = bisr::read_value_column(input);
  const auto fam = bisr::penalty_family_from_name(family);

  bisr::BivariateParams a{a1, a2};
  if (auto_params) {
    const auto fit = bisr::fit_tridiag_bound(h);
    a = bisr::params_from_tridiag(fit.bound, lambda);
    std::cout << "auto parameters: a1 " << bisr::format_double(a.a1) << " a2 "
              << bisr::format_double(a.a2) << "\n";
  }

  bisr::SolverConfig cfg;
  cfg.algorithm = parse_algorithm(algorithm);
  bisr::SolveResult r;
  if (unsafe) {
    bisr::Objective obj(h, std::move(y), lambda, bisr::BivariatePenalty{fam, a},
                        bisr::Objective::Unchecked{});
    std::cout << "warning: convexity certificate skipped; the sign-condition "
                 "check below is necessary but not sufficient\n";
    r = bisr::solve(obj, cfg);
  } else {
    bisr::Objective obj(h, std::move(y), lambda, bisr::BivariatePenalty{fam, a});
    r = bisr::solve(obj, cfg);
  }
  print_solution(r, out);
  return 0;
}

int run_check(const std::string& filter, double lambda) {
  const auto h = parse_filter(filter);
  const auto fit = bisr::fit_tridiag_bound(h);
  std::cout << "tridiagonal lower bound on |H(w)|^2: P(w) = p0 + 2 p1 cos(w)\n"
            << "  p0 " << bisr::format_double(fit.bound.p0) << "\n  p1 "
            << bisr::format_double(fit.bound.p1) << "\n";
  if (fit.degenerate) {
    std::cout << "bound is degenerate (P = 0): only the l1 penalty (a1 = a2 = 0) "
                 "is certified at any lambda\n";
    return 0;
  }
  const bisr::EigenPair eig{fit.bound.p0 + 2.0 * fit.bound.p1,
                            fit.bound.p0 - 2.0 * fit.bound.p1};
  const auto a = bisr::params_from_tridiag(fit.bound, lambda);
  std::cout << "pairwise eigenvalue bounds gamma1 " << bisr::format_double(eig.gamma1)
            << " gamma2 " << bisr::format_double(eig.gamma2) << "\n"
            << "maximal certified parameters at lambda "
            << bisr::format_double(lambda) << ":\n  a1 " << bisr::format_double(a.a1)
            << "\n  a2 " << bisr::format_double(a.a2) << "\n"
            << "separable limit (a1 = a2): "
            << bisr::format_double(bisr::separable_limit(eig, lambda)) << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& csv_out) {
  std::ifstream in(config_path);
  if (!in) throw std::domain_error("cannot open config: " + config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw std::domain_error(std::string("bad config json: ") + e.what());
  }

  bisr::ExperimentSpec spec;
  spec.n = cfg.value("n", spec.n);
  spec.n_impulses = cfg.value("n_impulses", spec.n_impulses);
  spec.beta = cfg.value("beta", spec.beta);
  spec.trials = cfg.value("trials", spec.trials);
  spec.seed = cfg.value("seed", spec.seed);
  spec.filter_preset = cfg.value("filter", spec.filter_preset);
  if (cfg.contains("algorithm"))
    spec.algorithm = parse_algorithm(cfg["algorithm"].get<std::string>());
  std::vector<double> sigmas = cfg.value("sigmas", std::vector<double>{4.0});
  if (sigmas.empty()) throw std::domain_error("config: empty sigma list");

  const auto report = bisr::run_sweep(spec, sigmas);
  bisr::write_sweep_table(std::cout, report);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw std::domain_error("cannot open for writing: " + csv_out);
    bisr::write_sweep_csv(out, report);
    std::cout << "wrote " << csv_out << "\n";
  }
  return 0;
}

int run_optimality(const std::string& input, const std::string& filter, double lambda,
                   double a1, double a2, const std::string& family,
                   const std::string& solution, double tol, bool unsafe,
                   const std::string& scatter_out) {
  const auto h = parse_filter(filter);
  auto y = bisr::read_value_column(input);
  const auto x = bisr::read_value_column(solution);
  const auto fam = bisr::penalty_family_from_name(family);
  const bisr::BivariatePenalty bp{fam, bisr::BivariateParams{a1, a2}};

  bisr::OptimalityReport rep;
  if (unsafe) {
    const bisr::Objective obj(h, std::move(y), lambda, bp, bisr::Objective::Unchecked{});
    rep = bisr::optimality_report(obj, x, tol);
  } else {
    const bisr::Objective obj(h, std::move(y), lambda, bp);
    rep = bisr::optimality_report(obj, x, tol);
  }

  if (rep.certificate_warning)
    std::cout << "warning: objective not certified convex; a passing check is "
                 "necessary but not sufficient for global optimality\n";
  std::cout << "max violation " << bisr::format_double(rep.max_violation) << " (tol "
            << bisr::format_double(rep.tol) << "): "
            << (rep.passed ? "pass" : "FAIL") << "\n";
  if (!scatter_out.empty()) {
    std::ofstream out(scatter_out);
    if (!out) throw std::domain_error("cannot open for writing: " + scatter_out);
    bisr::write_scatter_csv(out, rep);
    std::cout << "wrote " << scatter_out << "\n";
  } else {
    bisr::write_scatter_csv(std::cout, rep);
  }
  return rep.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse deconvolution with convexity-preserving bivariate penalties"};
  app.require_subcommand(1);

  int demo_example = 1;
  std::uint64_t demo_seed = 1;
  std::string demo_alg = "fbs";
  auto* demo = app.add_subcommand("demo", "solve a canned test instance");
  demo->add_option("--example", demo_example, "1: lowpass filter, 2: filter with a spectral null")
      ->check(CLI::IsMember({1, 2}));
  demo->add_option("--seed", demo_seed, "rng seed");
  demo->add_option("--algorithm", demo_alg, "fbs|mm");

  std::string dc_input, dc_filter, dc_family = "atan", dc_alg = "fbs", dc_out;
  double dc_lambda = 0.0, dc_a1 = 0.0, dc_a2 = 0.0;
  bool dc_auto = false, dc_unsafe = false;
  auto* dc = app.add_subcommand("deconv", "deconvolve a signal from CSV");
  dc->add_option("--input", dc_input, "observation CSV")->required();
  dc->add_option("--filter", dc_filter, "preset name, inline taps, or CSV")->required();
  dc->add_option("--lambda", dc_lambda, "regularization weight")->required();
  dc->add_option("--a1", dc_a1, "penalty parameter a1");
  dc->add_option("--a2", dc_a2, "penalty parameter a2");
  dc->add_flag("--auto", dc_auto, "derive maximal certified (a1, a2) from the filter");
  dc->add_option("--family", dc_family, "rational|log|atan");
  dc->add_option("--algorithm", dc_alg, "fbs|mm");
  dc->add_flag("--unsafe", dc_unsafe, "skip the convexity certificate");
  dc->add_option("--output", dc_out, "write the solution CSV here");

  std::string cc_filter;
  double cc_lambda = 1.0;
  auto* cc = app.add_subcommand("check-convexity", "certify penalty parameters for a filter");
  cc->add_option("--filter", cc_filter, "preset name, inline taps, or CSV")->required();
  cc->add_option("--lambda", cc_lambda, "regularization weight")->required();

  std::string sw_config, sw_csv;
  auto* sw = app.add_subcommand("sweep", "noise sweep over seeded trials");
  sw->add_option("--config", sw_config, "JSON config")->required();
  sw->add_option("--csv", sw_csv, "also write results as CSV");

  std::string op_input, op_filter, op_solution, op_family = "atan", op_scatter;
  double op_lambda = 0.0, op_a1 = 0.0, op_a2 = 0.0, op_tol = 1e-3;
  bool op_unsafe = false;
  auto* op = app.add_subcommand("optimality", "check the sign condition for a candidate solution");
  op->add_option("--input", op_input, "observation CSV")->required();
  op->add_option("--filter", op_filter, "preset name, inline taps, or CSV")->required();
  op->add_option("--lambda", op_lambda, "regularization weight")->required();
  op->add_option("--a1", op_a1, "penalty parameter a1");
  op->add_option("--a2", op_a2, "penalty parameter a2");
  op->add_option("--family", op_family, "rational|log|atan");
  op->add_option("--solution", op_solution, "candidate solution CSV")->required();
  op->add_option("--tol", op_tol, "violation tolerance");
  op->add_flag("--unsafe", op_unsafe, "skip the convexity certificate");
  op->add_option("--scatter", op_scatter, "write (index, x, v) scatter CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*demo) return run_demo(demo_example, demo_seed, demo_alg);
    if (*dc)
      return run_deconv(dc_input, dc_filter, dc_lambda, dc_a1, dc_a2, dc_auto,
                        dc_family, dc_alg, dc_unsafe, dc_out);
    if (*cc) return run_check(cc_filter, cc_lambda);
    if (*sw) return run_sweep_cmd(sw_config, sw_csv);
    if (*op)
      return run_optimality(op_input, op_filter, op_lambda, op_a1, op_a2, op_family,
                            op_solution, op_tol, op_unsafe, op_scatter);
  } catch (const bisr::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
