#pragma once

#include <pdaccel/functions.hpp>
#include <pdaccel/linops.hpp>
#include <pdaccel/trace.hpp>
#include <pdaccel/tuning.hpp>

#include <functional>
#include <optional>

namespace pdaccel {

/// min_xi sup_y G(xi) + <K xi, y> - H*(y).
struct SaddleProblem {
  ProxFunctionPtr G;
  ProxFunctionPtr Hstar;
  LinearMap K;

  Moduli moduli() const;
};

/// min_x g(x) + h(A x).
struct CompositeProblem {
  using XUpdate =
      std::function<Vector(const Vector& y, const Vector& z, double tau)>;
  /// Relative residual of the x-update's optimality condition at x.
  using XResidual = std::function<double(const Vector& x, const Vector& y,
                                         const Vector& z, double tau)>;

  ProxFunctionPtr g;
  ProxFunctionPtr h;
  ProxFunctionPtr hstar;
  LinearMap A;
  /// argmin_x g(x) + <A x, y> + ||A x - z||^2 / (2 tau).
  XUpdate x_update;
  XResidual x_residual;  // optional

  /// gamma of g, delta of h*, L of A.
  Moduli moduli() const;
  SaddleProblem saddle() const { return {g, hstar, A}; }
  double objective(const Vector& x) const;
};

/// Known or surrogate optimum used to fill the error columns of a trace.
struct Reference {
  std::optional<Vector> primal;
  std::optional<Vector> dual;
  std::optional<double> f_star;
  std::function<double(const Vector&)> objective;
};

struct RunOptions {
  /// Keep iterates every k-th step (0 keeps none). Errors are recorded at
  /// every step regardless.
  int snapshot_stride = 1;
  std::optional<double> ergodic_omega;
  /// Stop once the solution error falls below this value.
  std::optional<double> stop_solution_error;
  bool allow_infeasible = false;
  /// Tolerance on the x-update residual (ADMM).
  double x_update_tol = 1e-8;
};

Trace opdhg_run(const SaddleProblem& p, const ParameterSet& params,
                RelaxationSide side, int n_iters, const Vector& xi0,
                const Vector& y0, const Reference& ref = {},
                const RunOptions& opts = {});

Trace admm_run(const CompositeProblem& p, double tau, double tau_prime,
               int n_iters, const Vector& x0, const Vector& z0,
               const Vector& y0, const Reference& ref = {},
               const RunOptions& opts = {});

enum class FistaSchedule { Constant, Variable };

Trace fista_run(const CompositeProblem& p, double tau, FistaSchedule schedule,
                int n_iters, const Vector& x0, const Reference& ref = {},
                const RunOptions& opts = {});

struct AdmmInit {
  Vector x0;
  Vector z0;
  Vector y0;
};

/// x0 = 0, z0 = A x0, y0 = 0.
AdmmInit default_admm_init(const CompositeProblem& p);

/// Largest residual of the two identities linking consecutive ADMM
/// snapshots to the dual-relaxed primal-dual iteration:
///   y_{n+1} = prox_{h*/tau'}(y_n + A x_{n+1} / tau')
///   z_{n+1} = A x_{n+1} - tau' (y_{n+1} - y_n)
/// Needs an ADMM trace recorded with snapshot stride 1.
double equivalence_check(const Trace& admm_trace, double tau, double tau_prime,
                         const ProxFunction& hstar);

struct RateCheck {
  double worst_margin = -kInfinity;
  int worst_n = 0;
  bool secondary_checked = false;
};

/// Evaluates the iterate-distance bounds at every recorded n using rate
/// cert.omega_tilde and returns the worst (lhs - rhs) / rhs.
///
/// Primal relaxation bounds the primal distance by
///   w^N (|xi0 - xi*|^2 + (tau/sigma) |y0 - y*|^2)
/// and dual relaxation (ADMM included) mirrors this for the dual distance.
/// The companion bound on the other variable, with the factor
/// 1 / (1 - w L^2 tau sigma), is added only when that factor is finite.
///
/// Right-hand sides below `resolution` times their n = 0 value are
/// replaced by that floor, since double-precision errors cannot go lower.
RateCheck rate_bound_check(const Trace& trace, const RateCertificate& cert,
                           const ParameterSet& params,
                           double resolution = 1e-20);

/// Geometric mean of successive ratios of `values` over [first, last],
/// i.e. (v_last / v_first)^(1 / (last - first)). `last` is pulled back to
/// the last index whose value stays above floor * values[0].
double contraction_factor(const std::vector<double>& values, int first,
                          int last, double floor = 0.0);

}  // namespace pdaccel
