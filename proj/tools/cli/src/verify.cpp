#include <pdcli/verify.hpp>

#include <pdaccel/problems.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pdcli {

using namespace pdaccel;

namespace {

constexpr int kToyN = 15;
constexpr double kToyM = 10.0;
constexpr double kToym = 0.1;
constexpr double kFloor = 1e-24;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

int first_below(const Trace& t, double factor) {
  const double target = factor * t.rows.front().solution_error;
  for (const TraceRow& r : t.rows)
    if (r.solution_error <= target) return r.n;
  return -1;
}

std::vector<double> column(const Trace& t, double TraceRow::*field) {
  std::vector<double> out;
  for (const TraceRow& r : t.rows) out.push_back(r.*field);
  return out;
}

Trace run_toy_admm(const ToyInstance& toy, const ParameterSet& p, int iters) {
  const AdmmInit init = default_admm_init(toy.problem);
  return admm_run(toy.problem, p.tau, *p.tau_prime, iters, init.x0, init.z0,
                  init.y0, toy.reference());
}

CheckResult check_equivalence(bool fault) {
  CheckResult r{"equivalence", true, ""};
  const ToyInstance toy = toy_build(kToyN, kToym, kToyM);
  std::ostringstream d;
  for (const Tuning& t : {admm_optimal(toy.moduli), admm_accel_optimal(toy.moduli)}) {
    Trace tr = run_toy_admm(toy, t.params, 200);
    if (fault) tr.snapshots[100].y[3] += 1e-3;
    const double res =
        equivalence_check(tr, t.params.tau, *t.params.tau_prime, *toy.problem.hstar);
    r.passed = r.passed && res <= 1e-9;
    d << "tau'/tau=" << *t.params.tau_prime / t.params.tau << " residual=" << sci(res) << "; ";
  }
  r.detail = d.str();
  return r;
}

CheckResult check_rate_certificates(bool fault) {
  CheckResult r{"rate-certificates", true, ""};
  const ToyInstance toy = toy_build(kToyN, kToym, kToyM);
  std::ostringstream d;

  Tuning op = opdhg_optimal_solution_rate(toy.moduli);
  if (fault) op.cert.omega_tilde *= 0.5;
  const SaddleProblem sp = toy.problem.saddle();
  const Trace t1 = opdhg_run(sp, op.params, RelaxationSide::Primal, 500,
                             Vector::Zero(kToyN), Vector::Zero(kToyN - 1),
                             toy.reference());
  const RateCheck c1 = rate_bound_check(t1, op.cert, op.params);

  const Tuning ad = admm_accel_solution_rate(toy.moduli);
  const Trace t2 = run_toy_admm(toy, ad.params, 500);
  const RateCheck c2 = rate_bound_check(t2, ad.cert, ad.params);

  r.passed = c1.worst_margin <= 1e-8 && c2.worst_margin <= 1e-8;
  d << "opdhg margin=" << sci(c1.worst_margin) << " (n=" << c1.worst_n
    << "); admm-accel margin=" << sci(c2.worst_margin) << " (n=" << c2.worst_n << ")";
  r.detail = d.str();
  return r;
}

CheckResult check_oracle_identities(bool fault) {
  CheckResult r{"oracle-identities", true, ""};
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  std::uniform_real_distribution<double> ll(-1.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const Moduli m{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)),
                   std::pow(10.0, ll(rng))};
    Tuning acc = admm_accel_optimal(m);
    if (fault) acc.params.theta *= 1.0 + 1e-6;
    const Tuning op = opdhg_optimal(m);
    worst = std::max({worst, rel(acc.params.theta, *acc.params.tau_prime / acc.params.tau),
                      rel(op.params.tau * m.gamma, op.params.sigma * m.delta)});

    const Moduli sm = admm_saddle_moduli(m);
    struct Case {
      Tuning t;
      Moduli mod;
      RelaxationSide side;
      bool solution;
    };
    const std::array<Case, 6> cases{{
        {op, m, RelaxationSide::Primal, false},
        {opdhg_theta1_optimal(m), m, RelaxationSide::Primal, false},
        {opdhg_optimal_solution_rate(m), m, RelaxationSide::Primal, true},
        {admm_optimal(m), sm, RelaxationSide::Dual, false},
        {acc, sm, RelaxationSide::Dual, false},
        {admm_accel_solution_rate(m), sm, RelaxationSide::Dual, true},
    }};
    for (const Case& c : cases) {
      const auto v = validate_feasible(c.t.params, c.mod, c.side, c.solution);
      if (!v) {
        ++failures;
        continue;
      }
      const double gap = c.solution ? rel(v->omega_tilde, c.t.cert.omega_tilde)
                                     : rel(*v->omega, *c.t.cert.omega);
      if (gap > 1e-12) ++failures;
    }
  }
  r.passed = worst <= 1e-12 && failures == 0;
  r.detail = "identity gap=" + sci(worst) + ", certificate mismatches=" +
             std::to_string(failures) + " of 600";
  return r;
}

CheckResult check_rate_table(bool fault) {
  CheckResult r{"rate-table", true, ""};
  const std::vector<double> kappas{1, 10, 100, 1000};
  auto rows = rate_table(kappas);
  if (fault) std::swap(rows[2].fista, rows[2].admm);
  for (const RateRow& row : rows) {
    r.passed = r.passed && row.fista <= row.opdhg &&
               std::abs(row.opdhg - row.admm_accel) <= 1e-15 &&
               row.admm_accel <= row.admm;
  }
  const RateRow& k100 = rows[2];
  const std::array<double, 4> expected{0.900496, 0.904875, 0.904875, 0.933959};
  const std::array<double, 4> got{k100.fista, k100.opdhg, k100.admm_accel, k100.admm};
  for (int i = 0; i < 4; ++i) r.passed = r.passed && std::abs(got[i] - expected[i]) <= 1e-5;
  char buf[160];
  std::snprintf(buf, sizeof buf, "kappa=100: fista=%.6f opdhg=%.6f admm-accel=%.6f admm=%.6f",
                got[0], got[1], got[2], got[3]);
  r.detail = buf;
  return r;
}

CheckResult check_toy_convergence() {
  CheckResult r{"toy-convergence", true, ""};
  const ToyInstance toy = toy_build(kToyN, kToym, kToyM);
  const Tuning cl = admm_optimal(toy.moduli);
  const Tuning ac = admm_accel_optimal(toy.moduli);
  const Trace tc = run_toy_admm(toy, cl.params, 300);
  const Trace ta = run_toy_admm(toy, ac.params, 300);
  const int nc = first_below(tc, 1e-8);
  const int na = first_below(ta, 1e-8);
  const double rc = contraction_factor(column(tc, &TraceRow::solution_error), 50, 300, kFloor);
  const double ra = contraction_factor(column(ta, &TraceRow::solution_error), 50, 300, kFloor);
  r.passed = na > 0 && nc > 0 && na < nc && rc <= cl.cert.omega_tilde + 0.02 &&
             ra <= ac.cert.omega_tilde + 0.02;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "iterations to 1e-8: accel=%d classic=%d; contraction accel=%.4f "
                "(bound %.4f) classic=%.4f (bound %.4f)",
                na, nc, ra, ac.cert.omega_tilde + 0.02, rc, cl.cert.omega_tilde + 0.02);
  r.detail = buf;
  return r;
}

CheckResult check_denoise() {
  CheckResult r{"denoise", true, ""};
  const double cg_tol = 1e-14;
  const Image u = add_gaussian_noise(synthetic_image(32, 32, 1), 10.0, 42);
  DenoiseInstance d = denoise_build(u, 10.0, cg_tol);
  d.reference = reference_solution(d, 2000);
  const Tuning ac = admm_accel_optimal(d.moduli);
  const AdmmInit init = default_admm_init(d.problem);
  RunOptions opts;
  opts.snapshot_stride = 0;
  const Trace t = admm_run(d.problem, ac.params.tau, *ac.params.tau_prime, 120,
                           init.x0, init.z0, init.y0, d.as_reference(), opts);
  const int hit = first_below(t, 1e-6);
  const double floor = (100.0 * cg_tol) * (100.0 * cg_tol);
  const double rho = contraction_factor(column(t, &TraceRow::dual_error), 20, 100, floor);
  r.passed = hit >= 0 && hit <= 120 && rho <= ac.cert.omega_tilde + 0.05;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "iterations to 1e-6: %d; dual contraction=%.4f (bound %.4f); "
                "reference residual=%.2e",
                hit, rho, ac.cert.omega_tilde + 0.05, d.reference->residual);
  r.detail = buf;
  return r;
}

CheckResult check_calculus() {
  CheckResult r{"calculus", true, ""};
  std::mt19937_64 rng(7);
  double adj = 0.0;
  for (const LinearMap& K : {make_diff1d(40), make_grad2d(9, 7, 3)}) {
    const Vector x = random_vector(rng, K.in_dim());
    const Vector y = random_vector(rng, K.out_dim());
    adj = std::max(adj, std::abs(K.forward(x).dot(y) - x.dot(K.adjoint(y))) /
                            (x.norm() * y.norm()));
  }
  const double n1 = estimate_norm(make_diff1d(40), 5000, 1e-12).value;
  const double n2 = estimate_norm(make_grad2d(16, 16, 1), 5000, 1e-12).value;
  const bool norms_ok = n1 <= 1.0 + 1e-9 && n2 <= 2.0 * std::sqrt(2.0) + 1e-9;

  double moreau = 0.0;
  const std::array<std::pair<ProxFunctionPtr, ProxFunctionPtr>, 2> pairs{{
      {huber_sum(4), huber_conjugate(4)},
      {quadratic_l2(2.5, Vector::Zero(12)), scaled_quadratic_conjugate(2.5)},
  }};
  for (const auto& [f, fs] : pairs) {
    for (double t : {0.1, 1.0, 7.0}) {
      const Vector x = 3.0 * random_vector(rng, 12);
      moreau = std::max(moreau, (f->prox(x, t) + t * fs->prox(x / t, 1.0 / t) - x).norm());
    }
  }
  const bool all_ok = adj <= 1e-10 && norms_ok && moreau <= 1e-10;
  r.passed = all_ok;
  r.detail = "adjoint gap=" + sci(adj) + ", |K_N|~" + std::to_string(n1) +
             ", |grad|~" + std::to_string(n2) + ", Moreau gap=" + sci(moreau);
  return r;
}

CheckResult check_fista() {
  CheckResult r{"fista", true, ""};
  bool exact = true;
  double t = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double next = fista_schedule_step(t, 0.0).t_next;
    const double classic = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    exact = exact && next == classic;
    t = next;
  }
  const bool rate_exact = best_rate_fista(99.0) == 0.9;
  const ToyInstance toy = toy_build(kToyN, kToym, kToyM);
  const FistaParams fp = fista_params(toy.moduli);
  const Trace tr = fista_run(toy.problem, fp.tau, FistaSchedule::Constant, 300,
                             Vector::Zero(kToyN), toy.reference());
  const double C = tr.rows[10].objective_error / std::pow(0.9, 10);
  double worst = 0.0;
  for (const TraceRow& row : tr.rows)
    if (row.n >= 10) worst = std::max(worst, row.objective_error / (10.0 * C * std::pow(0.9, row.n)));
  r.passed = exact && rate_exact && worst <= 1.0;
  r.detail = std::string("t-sequence exact=") + (exact ? "yes" : "no") +
             ", omega(99)==0.9: " + (rate_exact ? "yes" : "no") +
             ", worst objective/(10 C 0.9^n)=" + sci(worst);
  return r;
}

CheckResult check_consensus() {
  CheckResult r{"consensus", true, ""};
  const ToyInstance toy = toy_build(kToyN, kToym, kToyM);
  const int iters = 600;
  std::vector<std::pair<std::string, double>> f;
  f.emplace_back("admm", toy.problem.objective(run_toy_admm(toy, admm_optimal(toy.moduli).params, iters).x));
  f.emplace_back("admm-accel",
                 toy.problem.objective(run_toy_admm(toy, admm_accel_optimal(toy.moduli).params, iters).x));
  const Tuning op = opdhg_optimal(toy.moduli);
  f.emplace_back("opdhg", toy.problem.objective(
                              opdhg_run(toy.problem.saddle(), op.params, RelaxationSide::Primal,
                                        iters, Vector::Zero(kToyN), Vector::Zero(kToyN - 1))
                                  .x));
  f.emplace_back("fista", toy.problem.objective(
                              fista_run(toy.problem, fista_params(toy.moduli).tau,
                                        FistaSchedule::Constant, iters, Vector::Zero(kToyN))
                                  .x));
  double worst = 0.0;
  std::ostringstream d;
  for (const auto& [name, value] : f) {
    const double e = std::abs(value - toy.f_star) / toy.f_star;
    worst = std::max(worst, e);
    d << name << '=' << sci(e) << ' ';
  }
  r.passed = worst <= 1e-6;
  r.detail = "relative gaps vs f*: " + d.str();
  return r;
}

}  // namespace

std::vector<std::string> check_names() {
  return {"equivalence", "rate-certificates", "oracle-identities", "rate-table",
          "toy-convergence", "denoise", "calculus", "fista", "consensus"};
}

std::vector<CheckResult> run_checks(const VerifyOptions& opts) {
  const std::vector<std::string> injectable{"equivalence", "rate-certificates",
                                            "oracle-identities", "rate-table"};
  if (!opts.inject_fault.empty() &&
      std::find(injectable.begin(), injectable.end(), opts.inject_fault) ==
          injectable.end()) {
    throw std::invalid_argument("no fault hook for check '" + opts.inject_fault + "'");
  }
  auto fault = [&](const char* name) { return opts.inject_fault == name; };

  std::vector<CheckResult> out;
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("equivalence", [&] { return check_equivalence(fault("equivalence")); });
  guarded("oracle-identities", [&] { return check_oracle_identities(fault("oracle-identities")); });
  guarded("rate-table", [&] { return check_rate_table(fault("rate-table")); });
  guarded("calculus", [&] { return check_calculus(); });
  guarded("fista", [&] { return check_fista(); });
  if (!opts.quick) {
    guarded("rate-certificates", [&] { return check_rate_certificates(fault("rate-certificates")); });
    guarded("toy-convergence", [&] { return check_toy_convergence(); });
    guarded("denoise", [&] { return check_denoise(); });
    guarded("consensus", [&] { return check_consensus(); });
  } else if (fault("rate-certificates")) {
    guarded("rate-certificates", [&] { return check_rate_certificates(true); });
  }
  return out;
}

}  // namespace pdcli
