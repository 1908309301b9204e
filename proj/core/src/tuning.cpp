#include <pdaccel/tuning.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdaccel {

namespace {

void require_positive(const Moduli& m) {
  if (!(m.gamma > 0.0) || !(m.delta > 0.0))
    throw std::domain_error("zero strong-convexity modulus: infinite condition");
  if (!(m.L > 0.0)) throw std::domain_error("operator norm bound must be > 0");
}

// (sqrt(1 + c k) - 1) / (sqrt(1 + c k) + 1) without cancellation.
double relaxation_from(double kappa, double c) {
  const double r = std::sqrt(1.0 + c * kappa);
  return c * kappa / ((r + 1.0) * (r + 1.0));
}

constexpr double kRelTol = 1e-12;

bool leq(double lhs, double rhs) {
  return lhs <= rhs + kRelTol * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

double condition_number(const Moduli& m) {
  require_positive(m);
  return m.L * m.L / (m.gamma * m.delta);
}

Moduli admm_saddle_moduli(const Moduli& composite) {
  return {composite.gamma / (composite.L * composite.L), composite.delta, 1.0};
}

Tuning opdhg_optimal(const Moduli& m) {
  const double kappa = condition_number(m);
  const double r = std::sqrt(1.0 + 4.0 * kappa);
  const double scale = (1.0 + r) / (2.0 * m.L * m.L);
  Tuning out;
  out.params.tau = m.delta * scale;
  out.params.sigma = m.gamma * scale;
  out.params.theta = relaxation_from(kappa, 4.0);
  out.cert.omega = out.params.theta;
  out.cert.omega_tilde = 4.0 * kappa / ((r + 1.0) * (r + 3.0));
  return out;
}

Tuning opdhg_optimal_solution_rate(const Moduli& m) {
  const double kappa = condition_number(m);
  const double r = std::sqrt(1.0 + kappa);
  const double scale = (1.0 + r) / (m.L * m.L);
  Tuning out;
  out.params.tau = m.delta * scale;
  out.params.sigma = m.gamma * scale;
  out.params.theta = relaxation_from(kappa, 1.0);
  out.cert.omega_tilde = out.params.theta;
  return out;
}

Tuning opdhg_theta1_optimal(const Moduli& m) {
  const double kappa = condition_number(m);
  const double s = std::sqrt(1.0 / (2.0 * kappa));
  Tuning out;
  out.params.tau = std::sqrt(m.delta / (2.0 * m.gamma * m.L * m.L));
  out.params.sigma = 1.0 / (m.L * m.L * out.params.tau);
  out.params.theta = 1.0;
  out.cert.omega = 1.0 / (s + 1.0);
  out.cert.omega_tilde = 1.0 / (2.0 * s + 1.0);
  return out;
}

Tuning admm_optimal(const Moduli& m) {
  const double kappa = condition_number(m);
  const double tau = std::sqrt(2.0 * m.delta * m.L * m.L / m.gamma);
  Tuning out;
  out.params = {tau, 1.0 / tau, 1.0, tau};
  out.cert.omega = 1.0 / (std::sqrt(1.0 / (2.0 * kappa)) + 1.0);
  out.cert.omega_tilde = 1.0 / (std::sqrt(2.0 / kappa) + 1.0);
  return out;
}

Tuning admm_accel_optimal(const Moduli& m) {
  const double kappa = condition_number(m);
  const double r = std::sqrt(1.0 + 4.0 * kappa);
  Tuning out;
  out.params.tau = 0.5 * m.delta * (1.0 + r);
  out.params.sigma = m.gamma * (1.0 + r) / (2.0 * m.L * m.L);
  out.params.tau_prime = 1.0 / out.params.sigma;
  out.params.theta = relaxation_from(kappa, 4.0);
  out.cert.omega = out.params.theta;
  // 1 / (2 delta / tau' + 1) in closed form.
  out.cert.omega_tilde = 4.0 * kappa / ((r + 1.0) * (r + 3.0));
  return out;
}

Tuning admm_accel_solution_rate(const Moduli& m) {
  const double kappa = condition_number(m);
  const double r = std::sqrt(1.0 + kappa);
  Tuning out;
  out.params.tau = m.delta * (r + 1.0);
  const double tau_prime = m.delta * kappa / (r + 1.0);  // delta (r - 1)
  out.params.tau_prime = tau_prime;
  out.params.sigma = 1.0 / tau_prime;
  out.params.theta = relaxation_from(kappa, 1.0);
  out.cert.omega_tilde = out.params.theta;
  return out;
}

FistaParams fista_params(const Moduli& m) {
  const double kappa = condition_number(m);
  FistaParams out;
  out.tau = m.delta / (m.L * m.L);
  const double a = out.tau * m.gamma;
  out.q = a / (1.0 + a);
  const double sq = std::sqrt(out.q);
  // Fixed point of the theta_n recursion at t_n = t_{n+1} = 1/sqrt(q).
  out.theta_const = (1.0 - sq) / (1.0 + sq);
  out.omega = best_rate_fista(kappa);
  return out;
}

FistaStep fista_schedule_step(double t_n, double q) {
  if (!(t_n >= 1.0))
    throw std::invalid_argument("fista_schedule_step: t_n must be >= 1");
  if (!(q >= 0.0 && q < 1.0))
    throw std::invalid_argument("fista_schedule_step: q must be in [0, 1)");
  const double u = 1.0 - q * t_n * t_n;
  FistaStep out;
  out.t_next = 0.5 * (u + std::sqrt(u * u + 4.0 * t_n * t_n));
  const double tau_gamma = q / (1.0 - q);
  out.theta = (1.0 + tau_gamma * (1.0 - out.t_next)) * (t_n - 1.0) / out.t_next;
  return out;
}

std::optional<RateCertificate> validate_feasible(const ParameterSet& p,
                                                 const Moduli& m,
                                                 RelaxationSide side,
                                                 bool doubled) {
  if (!(p.tau > 0.0) || !(p.sigma > 0.0))
    throw std::invalid_argument("validate_feasible: steps must be positive");
  if (!(m.gamma > 0.0) || !(m.delta > 0.0) || !(m.L > 0.0))
    throw std::domain_error("validate_feasible: moduli must be positive");
  if (p.tau_prime && std::abs(p.sigma * *p.tau_prime - 1.0) > kRelTol)
    throw std::invalid_argument("validate_feasible: ADMM form needs sigma tau' = 1");

  const double theta = p.theta;
  if (!(theta > 0.0) || !leq(theta, 1.0)) return std::nullopt;

  const double a = p.tau * m.gamma;
  const double b = p.sigma * m.delta;
  const double upper = 1.0 / (m.L * m.L * p.tau * p.sigma);

  const bool global_ok = leq(std::max(1.0 / (a + 1.0), 1.0 / (b + 1.0)), theta) &&
                         leq(theta, upper);
  const bool doubled_ok =
      leq(std::max(1.0 / (2.0 * a + 1.0), 1.0 / (2.0 * b + 1.0)), theta) &&
      leq(theta, upper);

  double omega;
  double omega_tilde;
  if (side == RelaxationSide::Primal) {
    omega = std::max(1.0 / (a + 1.0), (theta + 1.0) / (b + 2.0));
    omega_tilde = std::max(1.0 / (2.0 * a + 1.0), (theta + 1.0) / (2.0 * b + 2.0));
  } else {
    omega = std::max((theta + 1.0) / (a + 2.0), 1.0 / (b + 1.0));
    omega_tilde = std::max((theta + 1.0) / (2.0 * a + 2.0), 1.0 / (2.0 * b + 1.0));
  }

  if (!doubled) {
    if (!global_ok || !leq(omega, theta)) return std::nullopt;
    return RateCertificate{omega, omega_tilde};
  }
  if (!doubled_ok || !leq(omega_tilde, theta)) return std::nullopt;
  RateCertificate cert;
  if (global_ok && leq(omega, theta)) cert.omega = omega;
  cert.omega_tilde = omega_tilde;
  return cert;
}

double best_rate_admm(double kappa) {
  return 1.0 / (std::sqrt(1.0 / (2.0 * kappa)) + 1.0);
}

double best_rate_admm_accel(double kappa) { return relaxation_from(kappa, 4.0); }

double best_rate_opdhg(double kappa) { return relaxation_from(kappa, 4.0); }

double best_rate_fista(double kappa) { return 1.0 - std::sqrt(1.0 / (kappa + 1.0)); }

std::vector<RateRow> rate_table(std::span<const double> kappas) {
  std::vector<RateRow> rows;
  rows.reserve(kappas.size());
  for (double k : kappas) {
    if (!(k > 0.0)) throw std::invalid_argument("rate_table: kappa must be > 0");
    rows.push_back({k, best_rate_admm(k), best_rate_admm_accel(k),
                    best_rate_opdhg(k), best_rate_fista(k)});
  }
  return rows;
}

}  // namespace pdaccel
