#include <pdaccel/solvers.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pdaccel {

Moduli SaddleProblem::moduli() const {
  return {G->strong_convexity(), Hstar->strong_convexity(), K.norm_bound()};
}

Moduli CompositeProblem::moduli() const {
  return {g->strong_convexity(), hstar->strong_convexity(), A.norm_bound()};
}

double CompositeProblem::objective(const Vector& x) const {
  const double gx = g->eval(x);
  if (std::isinf(gx)) return gx;
  return gx + h->eval(A.forward(x));
}

namespace {

void require_dim(const Vector& v, Index n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(what);
}

class Recorder {
 public:
  Recorder(Trace& trace, const Reference& ref, const RunOptions& opts)
      : trace_(trace), ref_(ref), opts_(opts) {
    trace_.snapshot_stride = opts.snapshot_stride;
  }

  TraceRow base_row(int n, const Vector& x, const Vector* y) const {
    TraceRow row;
    row.n = n;
    if (ref_.objective && ref_.f_star) {
      const double fx = ref_.objective(x);
      row.objective_error = std::isinf(fx) ? fx : fx - *ref_.f_star;
    }
    if (ref_.primal) row.solution_error = (x - *ref_.primal).squaredNorm();
    if (y && ref_.dual) row.dual_error = (*y - *ref_.dual).squaredNorm();
    return row;
  }

  void push(const TraceRow& row) { trace_.rows.push_back(row); }

  void snapshot(int n, const Vector& x, const Vector* z, const Vector* y,
                const Vector* ax) {
    if (opts_.snapshot_stride <= 0 || n % opts_.snapshot_stride != 0) return;
    Snapshot s;
    s.n = n;
    s.x = x;
    if (z) s.z = *z;
    if (y) s.y = *y;
    if (ax) s.ax = *ax;
    trace_.snapshots.push_back(std::move(s));
  }

  void ergodic(const Vector& primal, const Vector& dual) {
    if (opts_.ergodic_omega)
      ergodic_update(trace_, primal, dual, *opts_.ergodic_omega);
  }

  bool should_stop(const TraceRow& row) const {
    return opts_.stop_solution_error && !std::isnan(row.solution_error) &&
           row.solution_error < *opts_.stop_solution_error;
  }

 private:
  Trace& trace_;
  const Reference& ref_;
  const RunOptions& opts_;
};

}  // namespace

Trace opdhg_run(const SaddleProblem& p, const ParameterSet& params,
                RelaxationSide side, int n_iters, const Vector& xi0,
                const Vector& y0, const Reference& ref,
                const RunOptions& opts) {
  if (n_iters < 1) throw std::invalid_argument("opdhg_run: n_iters must be >= 1");
  require_dim(xi0, p.K.in_dim(), "opdhg_run: xi0 dimension mismatch");
  require_dim(y0, p.K.out_dim(), "opdhg_run: y0 dimension mismatch");
  if (!opts.allow_infeasible &&
      !validate_feasible(params, p.moduli(), side, /*doubled=*/true)) {
    throw InfeasibleParameters(
        "opdhg_run: step sizes and relaxation violate the convergence "
        "conditions");
  }

  Trace trace;
  trace.kind = side == RelaxationSide::Primal ? SolverKind::OpdhgPrimal
                                              : SolverKind::OpdhgDual;
  trace.params = params;
  trace.coupling_norm = p.K.norm_bound();
  Recorder rec(trace, ref, opts);

  const double tau = params.tau;
  const double sigma = params.sigma;
  const double theta = params.theta;

  auto record = [&](int n, const Vector& xi, const Vector& y) {
    TraceRow row = rec.base_row(n, xi, &y);
    row.primal_error = row.solution_error;
    rec.push(row);
    rec.snapshot(n, xi, nullptr, &y, nullptr);
    return row;
  };

  Vector xi = xi0;
  Vector y = y0;
  record(0, xi, y);

  if (side == RelaxationSide::Primal) {
    Vector xi_bar = xi;
    for (int n = 1; n <= n_iters; ++n) {
      y = p.Hstar->prox(y + sigma * p.K.forward(xi_bar), sigma);
      Vector xi_next = p.G->prox(xi - tau * p.K.adjoint(y), tau);
      xi_bar = xi_next + theta * (xi_next - xi);
      xi = std::move(xi_next);
      rec.ergodic(xi, y);
      if (rec.should_stop(record(n, xi, y))) break;
    }
  } else {
    Vector y_bar = y;
    for (int n = 1; n <= n_iters; ++n) {
      xi = p.G->prox(xi - tau * p.K.adjoint(y_bar), tau);
      Vector y_next = p.Hstar->prox(y + sigma * p.K.forward(xi), sigma);
      y_bar = y_next + theta * (y_next - y);
      y = std::move(y_next);
      rec.ergodic(xi, y);
      if (rec.should_stop(record(n, xi, y))) break;
    }
  }
  trace.x = xi;
  trace.y = y;
  return trace;
}

AdmmInit default_admm_init(const CompositeProblem& p) {
  AdmmInit init;
  init.x0 = Vector::Zero(p.A.in_dim());
  init.z0 = p.A.forward(init.x0);
  init.y0 = Vector::Zero(p.A.out_dim());
  return init;
}

Trace admm_run(const CompositeProblem& p, double tau, double tau_prime,
               int n_iters, const Vector& x0, const Vector& z0,
               const Vector& y0, const Reference& ref,
               const RunOptions& opts) {
  if (n_iters < 1) throw std::invalid_argument("admm_run: n_iters must be >= 1");
  if (!(tau > 0.0) || !(tau_prime > 0.0))
    throw std::invalid_argument("admm_run: step sizes must be positive");
  if (tau_prime > tau && !opts.allow_infeasible)
    throw InfeasibleParameters("admm_run: tau' must not exceed tau");
  require_dim(x0, p.A.in_dim(), "admm_run: x0 dimension mismatch");
  require_dim(z0, p.A.out_dim(), "admm_run: z0 dimension mismatch");
  require_dim(y0, p.A.out_dim(), "admm_run: y0 dimension mismatch");

  Trace trace;
  trace.kind = SolverKind::Admm;
  trace.params = {tau, 1.0 / tau_prime, tau_prime / tau, tau_prime};
  trace.coupling_norm = 1.0;
  Recorder rec(trace, ref, opts);

  std::optional<Vector> ax_star;
  if (ref.primal) ax_star = p.A.forward(*ref.primal);

  auto record = [&](int n, const Vector& x, const Vector& ax, const Vector& z,
                    const Vector& y, const Vector& xi) {
    TraceRow row = rec.base_row(n, x, &y);
    row.feasibility_error = (ax - z).norm();
    if (ax_star) row.primal_error = (xi - *ax_star).squaredNorm();
    rec.push(row);
    rec.snapshot(n, x, &z, &y, &ax);
    return row;
  };

  Vector x = x0;
  Vector z = z0;
  Vector y = y0;
  Vector ax = p.A.forward(x);
  record(0, x, ax, z, y, z);

  for (int n = 1; n <= n_iters; ++n) {
    Vector x_next = p.x_update(y, z, tau);
    if (p.x_residual) {
      const double res = p.x_residual(x_next, y, z, tau);
      if (!(res <= opts.x_update_tol)) {
        std::ostringstream msg;
        msg << "admm_run: x-update residual " << res << " at iteration " << n
            << " exceeds " << opts.x_update_tol;
        throw ConvergenceError(msg.str(), res, n);
      }
    }
    x = std::move(x_next);
    ax = p.A.forward(x);
    Vector z_next = p.h->prox(ax + tau_prime * y, tau_prime);
    y += (ax - z_next) / tau_prime;
    z = std::move(z_next);
    rec.ergodic(x, y);
    if (rec.should_stop(record(n, x, ax, z, y, ax))) break;
  }
  trace.x = x;
  trace.y = y;
  trace.z = z;
  return trace;
}

Trace fista_run(const CompositeProblem& p, double tau, FistaSchedule schedule,
                int n_iters, const Vector& x0, const Reference& ref,
                const RunOptions& opts) {
  if (n_iters < 1) throw std::invalid_argument("fista_run: n_iters must be >= 1");
  if (!p.h->has_gradient())
    throw std::invalid_argument("fista_run: h has no gradient");
  const auto lip = p.h->lipschitz_gradient();
  if (!lip) throw std::invalid_argument("fista_run: gradient of h has no Lipschitz bound");
  require_dim(x0, p.A.in_dim(), "fista_run: x0 dimension mismatch");
  const double L = p.A.norm_bound();
  const double tau_max = 1.0 / (*lip * L * L);
  if (!(tau > 0.0)) throw std::invalid_argument("fista_run: tau must be positive");
  if (tau > tau_max * (1.0 + 1e-12) && !opts.allow_infeasible)
    throw InfeasibleParameters("fista_run: tau exceeds delta / L^2");

  const double a = tau * p.g->strong_convexity();
  const double q = a / (1.0 + a);
  const double sq = std::sqrt(q);
  const double theta_const = (1.0 - sq) / (1.0 + sq);

  Trace trace;
  trace.kind = SolverKind::Fista;
  trace.params.tau = tau;
  trace.params.sigma = 0.0;
  trace.params.theta = theta_const;
  trace.coupling_norm = L;
  Recorder rec(trace, ref, opts);

  auto record = [&](int n, const Vector& x) {
    TraceRow row = rec.base_row(n, x, nullptr);
    row.primal_error = row.solution_error;
    rec.push(row);
    rec.snapshot(n, x, nullptr, nullptr, nullptr);
    return row;
  };

  Vector x = x0;
  Vector x_bar = x0;
  double t = 1.0;
  record(0, x);
  for (int n = 1; n <= n_iters; ++n) {
    const Vector grad = p.A.adjoint(p.h->gradient(p.A.forward(x_bar)));
    Vector x_next = p.g->prox(x_bar - tau * grad, tau);
    double theta = theta_const;
    if (schedule == FistaSchedule::Variable) {
      const FistaStep step = fista_schedule_step(t, q);
      theta = step.theta;
      t = step.t_next;
    }
    x_bar = x_next + theta * (x_next - x);
    x = std::move(x_next);
    if (opts.ergodic_omega) rec.ergodic(x, Vector());
    if (rec.should_stop(record(n, x))) break;
  }
  trace.x = x;
  return trace;
}

double equivalence_check(const Trace& t, double tau, double tau_prime,
                         const ProxFunction& hstar) {
  if (t.kind != SolverKind::Admm)
    throw std::invalid_argument("equivalence_check: not an ADMM trace");
  if (!(tau > 0.0) || !(tau_prime > 0.0))
    throw std::invalid_argument("equivalence_check: step sizes must be positive");
  if (t.snapshots.size() < 2)
    throw std::invalid_argument("equivalence_check: missing snapshots");
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < t.snapshots.size(); ++i) {
    const Snapshot& a = t.snapshots[i];
    const Snapshot& b = t.snapshots[i + 1];
    if (b.n != a.n + 1 || a.y.size() == 0 || b.ax.size() == 0 ||
        b.z.size() == 0) {
      throw std::invalid_argument(
          "equivalence_check: missing snapshots (record with stride 1)");
    }
    const Vector& xi = b.ax;
    const Vector y_pd = hstar.prox(a.y + xi / tau_prime, 1.0 / tau_prime);
    const Vector z_pd = xi - tau_prime * (b.y - a.y);
    worst = std::max({worst, (b.y - y_pd).norm(), (b.z - z_pd).norm()});
  }
  return worst;
}

RateCheck rate_bound_check(const Trace& t, const RateCertificate& cert,
                           const ParameterSet& params, double resolution) {
  if (t.rows.empty()) throw std::invalid_argument("rate_bound_check: empty trace");
  if (t.kind == SolverKind::Fista)
    throw std::invalid_argument("rate_bound_check: no iterate bound for FISTA");
  for (const TraceRow& r : t.rows) {
    if (std::isnan(r.primal_error) || std::isnan(r.dual_error))
      throw std::invalid_argument("rate_bound_check: missing reference");
  }
  const double w = cert.omega_tilde;
  const double tau = params.tau;
  const double sigma = params.sigma;
  const double L = t.coupling_norm;
  const bool primal_side = t.kind == SolverKind::OpdhgPrimal;

  const double P0 = t.rows.front().primal_error;
  const double D0 = t.rows.front().dual_error;
  // Main bound constant and the companion bound constant (before the
  // 1 / (1 - w L^2 tau sigma) factor).
  const double main_c = primal_side ? P0 + (tau / sigma) * D0
                                    : D0 + (sigma / tau) * P0;
  const double side_c = primal_side ? (sigma / tau) * P0 + D0
                                    : (tau / sigma) * D0 + P0;
  const double denom = 1.0 - w * L * L * tau * sigma;
  const bool use_side = denom > 1e-12;

  RateCheck out;
  out.secondary_checked = use_side;
  auto consider = [&](double lhs, double rhs, double rhs0, int n) {
    const double scale = std::max(rhs, resolution * rhs0);
    double margin;
    if (scale > 0.0) {
      margin = (lhs - rhs) / scale;
    } else {
      margin = lhs > 0.0 ? kInfinity : 0.0;
    }
    if (margin > out.worst_margin) {
      out.worst_margin = margin;
      out.worst_n = n;
    }
  };
  for (const TraceRow& r : t.rows) {
    const double wn = std::pow(w, r.n);
    const double main_lhs = primal_side ? r.primal_error : r.dual_error;
    consider(main_lhs, wn * main_c, main_c, r.n);
    if (use_side) {
      const double side_lhs = primal_side ? r.dual_error : r.primal_error;
      consider(side_lhs, wn * side_c / denom, side_c / denom, r.n);
    }
  }
  return out;
}

double contraction_factor(const std::vector<double>& values, int first,
                          int last, double floor) {
  if (values.empty() || first < 0)
    throw std::invalid_argument("contraction_factor: bad range");
  last = std::min<int>(last, static_cast<int>(values.size()) - 1);
  const double cutoff = floor * values.front();
  while (last > first && !(values[last] > cutoff)) --last;
  if (last <= first)
    throw std::invalid_argument("contraction_factor: range collapsed below floor");
  return std::pow(values[last] / values[first], 1.0 / (last - first));
}

}  // namespace pdaccel
