#include <pdcli/experiment.hpp>
#include <pdcli/output.hpp>
#include <pdcli/verify.hpp>

#include <pdaccel/tuning.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace pdaccel;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::string num(double v) { return pdcli::format_number(v); }

void print_tuning(const char* name, const Tuning& t) {
  std::cout << "oracle=" << name << " tau=" << num(t.params.tau)
            << " sigma=" << num(t.params.sigma) << " tau_prime="
            << (t.params.tau_prime ? num(*t.params.tau_prime) : "") << " theta="
            << num(t.params.theta) << " omega="
            << (t.cert.omega ? num(*t.cert.omega) : "")
            << " omega_tilde=" << num(t.cert.omega_tilde) << '\n';
}

struct ParamsArgs {
  std::string problem;
  double m = 0.1, M = 10.0, mu = 10.0;
  std::optional<double> gamma, delta, L;
  std::vector<double> sweep;
};

int cmd_params(const ParamsArgs& a) {
  if (!a.sweep.empty()) {
    for (const RateRow& r : rate_table(a.sweep)) {
      std::cout << "kappa=" << num(r.kappa) << " admm=" << num(r.admm)
                << " admm_accel=" << num(r.admm_accel) << " opdhg=" << num(r.opdhg)
                << " fista=" << num(r.fista) << '\n';
    }
    return kOk;
  }
  Moduli m;
  if (a.gamma || a.delta) {
    if (!a.gamma || !a.delta)
      throw pdcli::ConfigError("--gamma and --delta must be given together");
    m = {*a.gamma, *a.delta, a.L.value_or(1.0)};
  } else if (a.problem == "toy") {
    if (!(a.m > 0.0) || !(a.M > a.m)) throw pdcli::ConfigError("need 0 < m < M");
    m = {a.m, 1.0 / (a.M - a.m), 1.0};
  } else if (a.problem == "denoise") {
    m = {a.mu, 1.0, 2.0 * std::sqrt(2.0)};
  } else {
    throw pdcli::ConfigError("give --problem toy|denoise or --gamma/--delta");
  }
  std::cout << "gamma=" << num(m.gamma) << " delta=" << num(m.delta)
            << " L=" << num(m.L) << '\n'
            << "kappa=" << num(condition_number(m)) << '\n';
  print_tuning("opdhg_optimal", opdhg_optimal(m));
  print_tuning("opdhg_optimal_solution_rate", opdhg_optimal_solution_rate(m));
  print_tuning("opdhg_theta1_optimal", opdhg_theta1_optimal(m));
  print_tuning("admm_optimal", admm_optimal(m));
  print_tuning("admm_accel_optimal", admm_accel_optimal(m));
  print_tuning("admm_accel_solution_rate", admm_accel_solution_rate(m));
  const FistaParams f = fista_params(m);
  std::cout << "oracle=fista tau=" << num(f.tau) << " q=" << num(f.q)
            << " theta=" << num(f.theta_const) << " omega=" << num(f.omega) << '\n';
  return kOk;
}

struct RunArgs {
  pdcli::ExperimentConfig cfg;
  std::string problem = "toy", solver = "admm-accel", mode = "oracle-global";
  std::string out = "-", svg, title;
  std::vector<std::string> svg_columns;
};

int cmd_run(RunArgs& a) {
  a.cfg.problem = pdcli::parse_problem(a.problem);
  a.cfg.solver = pdcli::parse_solver(a.solver);
  a.cfg.mode = pdcli::parse_mode(a.mode);
  const pdcli::ExperimentResult res = pdcli::run_experiment(a.cfg);

  if (a.out == "-") {
    pdcli::write_csv(std::cout, res.table);
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw FormatError("cannot open " + a.out);
    pdcli::write_csv(f, res.table);
    if (!f) throw FormatError("write failed: " + a.out);
  }
  if (!a.svg.empty()) {
    std::ofstream f(a.svg, std::ios::binary);
    if (!f) throw FormatError("cannot open " + a.svg);
    pdcli::SvgOptions opts;
    opts.title = a.title.empty() ? std::string(pdcli::solver_name(a.cfg.solver)) + " on " + a.problem
                                 : a.title;
    opts.columns = a.svg_columns.empty()
                       ? std::vector<std::string>{"solution_error", "theory_solution",
                                                  "objective_error", "theory_global"}
                       : a.svg_columns;
    pdcli::write_svg(f, res.table, opts);
  }
  return kOk;
}

int cmd_verify(const pdcli::VerifyOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const auto results = pdcli::run_checks(opts);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu checks, %s, %.2f s\n", results.size(), ok ? "all passed" : "FAILED",
              secs);
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated primal-dual and ADMM solvers: parameters, experiments, checks"};
  app.require_subcommand(1);

  ParamsArgs pa;
  auto* params = app.add_subcommand("params", "Print oracle step sizes and rates");
  params->add_option("--problem", pa.problem, "toy or denoise");
  params->add_option("--m", pa.m, "toy: strong convexity m");
  params->add_option("--M", pa.M, "toy: smoothness M");
  params->add_option("--mu", pa.mu, "denoise: data weight");
  params->add_option("--gamma", pa.gamma, "modulus of g");
  params->add_option("--delta", pa.delta, "modulus of h*");
  params->add_option("--L", pa.L, "operator norm bound");
  params->add_option("--kappa-sweep", pa.sweep, "rate table rows for these kappas")
      ->delimiter(',');

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run one experiment and write a CSV trace");
  auto& c = ra.cfg;
  run->add_option("--problem", ra.problem, "toy or denoise")->capture_default_str();
  run->add_option("--solver", ra.solver, "admm, admm-accel, opdhg, opdhg-dual, fista")
      ->capture_default_str();
  run->add_option("--mode", ra.mode, "oracle-global, oracle-solution, manual")
      ->capture_default_str();
  run->add_option("--iters", c.iters, "iteration budget")->capture_default_str();
  run->add_option("--out", ra.out, "CSV path, '-' for stdout")->capture_default_str();
  run->add_option("--svg", ra.svg, "SVG plot path");
  run->add_option("--svg-columns", ra.svg_columns, "columns to plot")->delimiter(',');
  run->add_option("--title", ra.title, "plot title");
  run->add_option("--N", c.N, "toy: dimension")->capture_default_str();
  run->add_option("--m", c.m, "toy: m")->capture_default_str();
  run->add_option("--M", c.M, "toy: M")->capture_default_str();
  run->add_option("--image", c.image_path, "denoise: PPM/PGM input (default synthetic)");
  run->add_option("--size", c.synthetic_size, "denoise: synthetic image size")
      ->capture_default_str();
  run->add_option("--channels", c.channels, "denoise: synthetic channels (1 or 3)")
      ->capture_default_str();
  run->add_option("--mu", c.mu, "denoise: data weight")->capture_default_str();
  run->add_option("--noise", c.noise_std, "denoise: noise standard deviation")
      ->capture_default_str();
  run->add_option("--seed", c.seed, "denoise: noise seed")->capture_default_str();
  run->add_option("--reference-budget", c.reference_budget, "denoise: reference iterations")
      ->capture_default_str();
  run->add_option("--reference-cache", c.reference_cache, "denoise: reference file");
  run->add_option("--cg-tol", c.cg_tol, "denoise: CG relative tolerance")
      ->capture_default_str();
  run->add_option("--tau", c.tau, "manual tau");
  run->add_option("--sigma", c.sigma, "manual sigma");
  run->add_option("--tau-prime", c.tau_prime, "manual tau'");
  run->add_option("--theta", c.theta, "manual theta");
  run->add_flag("--allow-infeasible", c.allow_infeasible, "skip the parameter check");
  run->add_flag("--fista-variable", c.fista_variable, "variable FISTA schedule");
  run->add_option("--stride", c.snapshot_stride, "keep every k-th iterate")
      ->capture_default_str();

  pdcli::VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_flag("--quick", vo.quick, "fast subset");
  verify->add_option("--inject-fault", vo.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*params) return cmd_params(pa);
    if (*run) return cmd_run(ra);
    if (*verify) return cmd_verify(vo);
  } catch (const pdcli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
