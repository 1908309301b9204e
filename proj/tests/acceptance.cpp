// Acceptance criteria 1-9. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.
#include <pdaccel/linops.hpp>
#include <pdaccel/problems.hpp>
#include <pdaccel/solvers.hpp>
#include <pdaccel/tuning.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace pdaccel;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr double kFloor = 1e-24;

const ToyInstance& toy() {
  static const ToyInstance t = toy_build(15, 0.1, 10.0);
  return t;
}

Trace toy_admm(const ParameterSet& p, int iters, int stride = 1) {
  const AdmmInit init = default_admm_init(toy().problem);
  RunOptions opts;
  opts.snapshot_stride = stride;
  return admm_run(toy().problem, p.tau, *p.tau_prime, iters, init.x0, init.z0, init.y0,
                  toy().reference(), opts);
}

std::vector<double> column(const Trace& t, double TraceRow::*f) {
  std::vector<double> v;
  for (const TraceRow& r : t.rows) v.push_back(r.*f);
  return v;
}

int first_below(const Trace& t, double factor) {
  const double target = factor * t.rows.front().solution_error;
  for (const TraceRow& r : t.rows)
    if (r.solution_error <= target) return r.n;
  return -1;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome equivalence() {
  double worst = 0.0;
  for (const Tuning& t : {admm_optimal(toy().moduli), admm_accel_optimal(toy().moduli)}) {
    const Trace tr = toy_admm(t.params, 200);
    worst = std::max(worst, equivalence_check(tr, t.params.tau, *t.params.tau_prime,
                                              *toy().problem.hstar));
  }
  return {worst <= 1e-9, fmt("max residual %.3e (limit 1e-9)", worst)};
}

Outcome rate_certificates() {
  const Tuning op = opdhg_optimal_solution_rate(toy().moduli);
  const Trace t1 = opdhg_run(toy().problem.saddle(), op.params, RelaxationSide::Primal, 500,
                             Vector::Zero(15), Vector::Zero(14), toy().reference());
  const double m1 = rate_bound_check(t1, op.cert, op.params).worst_margin;
  const Tuning ad = admm_accel_solution_rate(toy().moduli);
  const double m2 = rate_bound_check(toy_admm(ad.params, 500, 0), ad.cert, ad.params).worst_margin;
  return {m1 <= 1e-8 && m2 <= 1e-8,
          fmt("worst margin opdhg %.3e, admm-accel %.3e (limit 1e-8)", m1, m2)};
}

Outcome oracle_identities() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  double gap = 0.0;
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    const Moduli m{std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng)), std::pow(10.0, lg(rng) / 3)};
    const Moduli sm = admm_saddle_moduli(m);
    const Tuning acc = admm_accel_optimal(m);
    const Tuning op = opdhg_optimal(m);
    gap = std::max(gap, std::abs(acc.params.theta - *acc.params.tau_prime / acc.params.tau) /
                            acc.params.theta);
    gap = std::max(gap, std::abs(op.params.tau * m.gamma - op.params.sigma * m.delta) /
                            (op.params.tau * m.gamma));
    auto certify = [&](const Tuning& t, const Moduli& mod, RelaxationSide side, bool solution) {
      const auto v = validate_feasible(t.params, mod, side, solution);
      if (!v) return false;
      const double want = solution ? t.cert.omega_tilde : *t.cert.omega;
      const double got = solution ? v->omega_tilde : *v->omega;
      return std::abs(got - want) <= 1e-12 * want;
    };
    bad += !certify(op, m, RelaxationSide::Primal, false);
    bad += !certify(opdhg_theta1_optimal(m), m, RelaxationSide::Primal, false);
    bad += !certify(opdhg_optimal_solution_rate(m), m, RelaxationSide::Primal, true);
    bad += !certify(admm_optimal(m), sm, RelaxationSide::Dual, false);
    bad += !certify(acc, sm, RelaxationSide::Dual, false);
    bad += !certify(admm_accel_solution_rate(m), sm, RelaxationSide::Dual, true);
  }
  return {gap <= 1e-12 && bad == 0,
          fmt("identity gap %.2e, certificate mismatches %d of 600", gap, bad)};
}

Outcome rate_ordering() {
  const std::array<double, 4> kappas{1, 10, 100, 1000};
  bool ordered = true;
  for (const RateRow& r : rate_table(kappas))
    ordered = ordered && r.fista <= r.opdhg && r.opdhg == r.admm_accel && r.admm_accel <= r.admm;
  // Closed-form evaluations at kappa = 100.
  const std::array<double, 4> frozen{0.900496, 0.904875, 0.904875, 0.933959};
  const std::array<double, 4> got{best_rate_fista(100), best_rate_opdhg(100),
                                  best_rate_admm_accel(100), best_rate_admm(100)};
  double dev = 0.0;
  for (int i = 0; i < 4; ++i) dev = std::max(dev, std::abs(got[i] - frozen[i]));
  return {ordered && dev <= 1e-5,
          fmt("ordered=%s, kappa=100 rates %.6f/%.6f/%.6f/%.6f, max deviation %.1e",
              ordered ? "yes" : "no", got[0], got[1], got[2], got[3], dev)};
}

Outcome toy_convergence() {
  const Tuning cl = admm_optimal(toy().moduli);
  const Tuning ac = admm_accel_optimal(toy().moduli);
  const Trace tc = toy_admm(cl.params, 300, 0);
  const Trace ta = toy_admm(ac.params, 300, 0);
  const int nc = first_below(tc, 1e-8), na = first_below(ta, 1e-8);
  const double rc = contraction_factor(column(tc, &TraceRow::solution_error), 50, 300, kFloor);
  const double ra = contraction_factor(column(ta, &TraceRow::solution_error), 50, 300, kFloor);
  const bool pass = na > 0 && nc > 0 && na < nc && rc <= cl.cert.omega_tilde + 0.02 &&
                    ra <= ac.cert.omega_tilde + 0.02;
  return {pass, fmt("iterations to 1e-8: accel %d < classic %d; contraction %.4f <= %.4f, "
                    "%.4f <= %.4f",
                    na, nc, ra, ac.cert.omega_tilde + 0.02, rc, cl.cert.omega_tilde + 0.02)};
}

Outcome denoise() {
  const double cg_tol = 1e-14;
  DenoiseInstance d =
      denoise_build(add_gaussian_noise(synthetic_image(32, 32, 1), 10.0, 42), 10.0, cg_tol);
  d.reference = reference_solution(d, 2000);
  const Tuning ac = admm_accel_optimal(d.moduli);
  const AdmmInit init = default_admm_init(d.problem);
  RunOptions opts;
  opts.snapshot_stride = 0;
  const Trace t = admm_run(d.problem, ac.params.tau, *ac.params.tau_prime, 120, init.x0,
                           init.z0, init.y0, d.as_reference(), opts);
  const int hit = first_below(t, 1e-6);
  const double floor = (100 * cg_tol) * (100 * cg_tol);
  const double rho = contraction_factor(column(t, &TraceRow::dual_error), 20, 100, floor);
  return {hit >= 0 && rho <= ac.cert.omega_tilde + 0.05,
          fmt("solution error below 1e-6 of initial at n=%d; dual contraction %.4f <= %.4f",
              hit, rho, ac.cert.omega_tilde + 0.05)};
}

Outcome calculus() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  auto randv = [&](Index n, double s = 1.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = s * nd(rng);
    return v;
  };
  double adj = 0.0;
  for (const LinearMap& K : {make_diff1d(33), make_grad2d(11, 7, 3), make_grad2d(5, 5, 1)}) {
    const Vector x = randv(K.in_dim()), y = randv(K.out_dim());
    adj = std::max(adj, std::abs(K.forward(x).dot(y) - x.dot(K.adjoint(y))) /
                            (x.norm() * y.norm()));
  }
  const double nk = estimate_norm(make_diff1d(40), 20000, 1e-12).value;
  const double ng = estimate_norm(make_grad2d(16, 16, 1), 20000, 1e-12).value;
  const bool norms = nk <= 1.0 + 1e-9 && ng <= 2 * std::sqrt(2.0) + 1e-9;

  double moreau = 0.0;
  bool firm = true, convex = true;
  const std::array<std::pair<ProxFunctionPtr, ProxFunctionPtr>, 2> pairs{
      {{huber_sum(2), huber_conjugate(2)},
       {quadratic_l2(3.0, Vector::Zero(10)), scaled_quadratic_conjugate(3.0)}}};
  for (const auto& [f, fs] : pairs) {
    for (double t : {0.05, 0.5, 5.0}) {
      const Vector a = randv(10, 3.0), b = randv(10, 3.0);
      moreau = std::max(moreau, (f->prox(a, t) + t * fs->prox(a / t, 1 / t) - a).norm());
      for (const ProxFunctionPtr& g : {f, fs}) {
        const Vector pa = g->prox(a, t), pb = g->prox(b, t);
        firm = firm && (pa - pb).squaredNorm() <= (pa - pb).dot(a - b) + 1e-12;
      }
    }
    const Vector x1 = randv(10, 2.0), x2 = randv(10, 2.0);
    const double alpha = f->strong_convexity();
    convex = convex && f->eval(x2) >= f->eval(x1) + f->gradient(x1).dot(x2 - x1) +
                                           0.5 * alpha * (x2 - x1).squaredNorm() - 1e-12;
  }
  double fd_err = 0.0;
  const auto h = huber_sum(2);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = randv(8, 1.5);
    for (Index g = 0; g < 4; ++g) {
      const double s = x.segment(2 * g, 2).norm();
      if (std::abs(s - 1.0) < 1e-2) x.segment(2 * g, 2) *= 1.1;
    }
    const Vector grad = h->gradient(x);
    for (Index i = 0; i < 8; ++i) {
      Vector p = x, q = x;
      p[i] += 1e-6;
      q[i] -= 1e-6;
      const double fd = (h->eval(p) - h->eval(q)) / 2e-6;
      fd_err = std::max(fd_err, std::abs(fd - grad[i]) / std::max(1.0, grad.norm()));
    }
  }
  const bool pass = adj <= 1e-10 && norms && moreau <= 1e-10 && firm && convex && fd_err <= 1e-6;
  return {pass, fmt("adjoint %.1e, norms %.6f / %.6f, Moreau %.1e, firm=%s, convex=%s, "
                    "Huber FD %.1e",
                    adj, nk, ng, moreau, firm ? "yes" : "no", convex ? "yes" : "no", fd_err)};
}

Outcome fista() {
  bool exact = true;
  double t = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double next = fista_schedule_step(t, 0.0).t_next;
    exact = exact && next == (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    t = next;
  }
  const double omega = fista_params(toy().moduli).omega;
  const Trace tr = fista_run(toy().problem, fista_params(toy().moduli).tau,
                             FistaSchedule::Constant, 300, Vector::Zero(15), toy().reference());
  const double C = tr.rows[10].objective_error / std::pow(0.9, 10);
  double worst = 0.0;
  for (const TraceRow& r : tr.rows)
    if (r.n >= 10) worst = std::max(worst, r.objective_error / (10 * C * std::pow(0.9, r.n)));
  return {exact && omega == 0.9 && worst <= 1.0,
          fmt("t-recursion exact=%s, omega=%.17g, max objective/(10 C 0.9^n)=%.3f",
              exact ? "yes" : "no", omega, worst)};
}

Outcome consensus() {
  const int n = 600;
  const double fs = toy().f_star;
  const std::array<double, 4> f{
      toy().problem.objective(toy_admm(admm_optimal(toy().moduli).params, n, 0).x),
      toy().problem.objective(toy_admm(admm_accel_optimal(toy().moduli).params, n, 0).x),
      toy().problem.objective(opdhg_run(toy().problem.saddle(), opdhg_optimal(toy().moduli).params,
                                        RelaxationSide::Primal, n, Vector::Zero(15),
                                        Vector::Zero(14))
                                  .x),
      toy().problem.objective(fista_run(toy().problem, fista_params(toy().moduli).tau,
                                        FistaSchedule::Constant, n, Vector::Zero(15))
                                  .x)};
  double worst = 0.0;
  for (double v : f) worst = std::max(worst, std::abs(v - fs) / fs);
  return {worst <= 1e-6, fmt("max relative gap to f* = %.3e", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::array<Criterion, 9> criteria{{
      {1, "ADMM / primal-dual equivalence", equivalence, 1.0},
      {2, "rate certificates", rate_certificates, 2.0},
      {3, "oracle identities", oracle_identities, 5.0},
      {4, "rate ordering", rate_ordering, 1.0},
      {5, "toy convergence", toy_convergence, 2.0},
      {6, "denoising", denoise, 30.0},
      {7, "calculus suite", calculus, 10.0},
      {8, "FISTA degeneration", fista, 2.0},
      {9, "cross-solver consensus", consensus, 5.0},
  }};
  toy();
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool timely = secs <= c.budget_s;
    const bool pass = o.pass && timely;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, timely ? "" : ", over time budget");
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
