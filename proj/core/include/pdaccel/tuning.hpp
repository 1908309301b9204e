#pragma once

#include <pdaccel/types.hpp>

#include <optional>
#include <span>
#include <vector>

namespace pdaccel {

/// Strong-convexity moduli and operator norm of a problem.
///
/// For the primal-dual oracles these are the saddle-point quantities
/// (modulus of G, modulus of H*, norm of K). For the ADMM and FISTA oracles
/// they are the composite quantities (modulus of g, modulus of h*, norm of
/// A); admm_saddle_moduli() maps the latter to the former.
struct Moduli {
  double gamma = 0.0;
  double delta = 0.0;
  double L = 1.0;
};

enum class RelaxationSide { Primal, Dual };

/// Step sizes and relaxation. ADMM forms set tau_prime with
/// sigma = 1 / tau_prime and theta = tau_prime / tau.
struct ParameterSet {
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 1.0;
  std::optional<double> tau_prime;
};

/// omega: global (ergodic) rate; absent when the parameters were tuned for
/// the solution-error rate only and do not satisfy the global conditions.
/// omega_tilde: rate for the iterate distances to the saddle point.
struct RateCertificate {
  std::optional<double> omega;
  double omega_tilde = 1.0;
};

struct Tuning {
  ParameterSet params;
  RateCertificate cert;
};

/// L^2 / (gamma delta). Throws std::domain_error for a zero modulus.
double condition_number(const Moduli& m);

/// Saddle moduli of the ADMM reformulation: (gamma / L^2, delta, 1).
Moduli admm_saddle_moduli(const Moduli& composite);

/// Best global rate with free theta; omega = theta.
Tuning opdhg_optimal(const Moduli& m);
/// Best solution-error rate: the same optimum with both moduli doubled.
Tuning opdhg_optimal_solution_rate(const Moduli& m);
/// Best rates with theta fixed to 1 (sigma tau L^2 = 1).
Tuning opdhg_theta1_optimal(const Moduli& m);

/// Classic ADMM, tau = tau' = sqrt(2 delta L^2 / gamma).
Tuning admm_optimal(const Moduli& m);
/// Accelerated ADMM with the best global rate.
Tuning admm_accel_optimal(const Moduli& m);
/// Accelerated ADMM with the best dual solution-error rate.
Tuning admm_accel_solution_rate(const Moduli& m);

struct FistaParams {
  double tau = 0.0;
  double q = 0.0;
  double theta_const = 0.0;
  double omega = 1.0;
};

/// Strongly convex FISTA with the largest admissible step tau = delta / L^2.
FistaParams fista_params(const Moduli& m);

struct FistaStep {
  double t_next = 1.0;
  double theta = 0.0;
};

/// One step of the t-recursion and the matching relaxation theta_n.
FistaStep fista_schedule_step(double t_n, double q);

/// Checks the parameter conditions and returns the smallest admissible
/// rates, or nullopt when the conditions fail.
///
/// doubled == false: requires the global conditions; both omega and the
/// (weaker) solution-error bound omega_tilde are reported.
/// doubled == true: requires only the doubled-moduli conditions; omega is
/// reported only if the global conditions also hold.
///
/// Relaxation on the dual side swaps the roles of tau*gamma and
/// sigma*delta in the rate bounds.
std::optional<RateCertificate> validate_feasible(const ParameterSet& p,
                                                 const Moduli& m,
                                                 RelaxationSide side,
                                                 bool doubled = false);

struct RateRow {
  double kappa = 0.0;
  double admm = 0.0;
  double admm_accel = 0.0;
  double opdhg = 0.0;
  double fista = 0.0;
};

/// Best-rate formulas as functions of the condition number.
double best_rate_admm(double kappa);
double best_rate_admm_accel(double kappa);
double best_rate_opdhg(double kappa);
double best_rate_fista(double kappa);

std::vector<RateRow> rate_table(std::span<const double> kappas);

}  // namespace pdaccel
