#include <pdcli/experiment.hpp>

#include <pdaccel/image.hpp>

#include <cmath>
#include <filesystem>
#include <limits>

namespace pdcli {

using namespace pdaccel;

SolverChoice parse_solver(const std::string& s) {
  if (s == "admm") return SolverChoice::Admm;
  if (s == "admm-accel") return SolverChoice::AdmmAccel;
  if (s == "opdhg") return SolverChoice::Opdhg;
  if (s == "opdhg-dual") return SolverChoice::OpdhgDual;
  if (s == "fista") return SolverChoice::Fista;
  throw ConfigError("unknown solver '" + s + "'");
}

ProblemKind parse_problem(const std::string& s) {
  if (s == "toy") return ProblemKind::Toy;
  if (s == "denoise") return ProblemKind::Denoise;
  throw ConfigError("unknown problem '" + s + "'");
}

ParamMode parse_mode(const std::string& s) {
  if (s == "oracle-global") return ParamMode::OracleGlobal;
  if (s == "oracle-solution") return ParamMode::OracleSolution;
  if (s == "manual") return ParamMode::Manual;
  throw ConfigError("unknown parameter mode '" + s + "'");
}

const char* solver_name(SolverChoice s) {
  switch (s) {
    case SolverChoice::Admm: return "admm";
    case SolverChoice::AdmmAccel: return "admm-accel";
    case SolverChoice::Opdhg: return "opdhg";
    case SolverChoice::OpdhgDual: return "opdhg-dual";
    case SolverChoice::Fista: return "fista";
  }
  return "?";
}

namespace {

struct Setup {
  CompositeProblem problem;
  Reference ref;
  Moduli moduli;
};

Setup build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == ProblemKind::Toy) {
    ToyInstance t = toy_build(cfg.N, cfg.m, cfg.M);
    return {t.problem, t.reference(), t.moduli};
  }
  Image clean = cfg.image_path.empty()
                    ? synthetic_image(cfg.synthetic_size, cfg.synthetic_size,
                                      cfg.channels)
                    : load_ppm(cfg.image_path);
  DenoiseInstance d = denoise_build(add_gaussian_noise(clean, cfg.noise_std, cfg.seed),
                                    cfg.mu, cfg.cg_tol);
  const bool cached = !cfg.reference_cache.empty() &&
                      std::filesystem::exists(cfg.reference_cache);
  if (cached) {
    d.reference = load_reference(cfg.reference_cache);
    if (d.reference->primal.size() != d.problem.A.in_dim() ||
        d.reference->dual.size() != d.problem.A.out_dim()) {
      throw ConfigError("reference cache does not match the image dimensions");
    }
  } else {
    d.reference = reference_solution(d, cfg.reference_budget);
    if (!cfg.reference_cache.empty())
      save_reference(*d.reference, d.u, cfg.reference_cache);
  }
  return {d.problem, d.as_reference(), d.moduli};
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw ConfigError(std::string("manual mode needs ") + flag);
  return *v;
}

bool is_admm(SolverChoice s) {
  return s == SolverChoice::Admm || s == SolverChoice::AdmmAccel;
}

ParameterSet choose_params(const ExperimentConfig& cfg, const Moduli& m) {
  const bool solution = cfg.mode == ParamMode::OracleSolution;
  switch (cfg.solver) {
    case SolverChoice::Admm:
      if (cfg.mode != ParamMode::Manual) return admm_optimal(m).params;
      break;
    case SolverChoice::AdmmAccel:
      if (cfg.mode != ParamMode::Manual)
        return (solution ? admm_accel_solution_rate(m) : admm_accel_optimal(m)).params;
      break;
    case SolverChoice::Opdhg:
    case SolverChoice::OpdhgDual:
      if (cfg.mode != ParamMode::Manual)
        return (solution ? opdhg_optimal_solution_rate(m) : opdhg_optimal(m)).params;
      break;
    case SolverChoice::Fista: {
      ParameterSet p;
      p.tau = cfg.mode == ParamMode::Manual ? require(cfg.tau, "--tau")
                                            : fista_params(m).tau;
      return p;
    }
  }
  ParameterSet p;
  p.tau = require(cfg.tau, "--tau");
  if (is_admm(cfg.solver)) {
    const double tp = cfg.solver == SolverChoice::Admm
                          ? cfg.tau_prime.value_or(p.tau)
                          : require(cfg.tau_prime, "--tau-prime");
    if (!(tp > 0.0)) throw ConfigError("--tau-prime must be positive");
    p.tau_prime = tp;
    p.sigma = 1.0 / tp;
    p.theta = tp / p.tau;
  } else {
    p.sigma = require(cfg.sigma, "--sigma");
    p.theta = cfg.theta.value_or(1.0);
  }
  if (!(p.tau > 0.0) || !(p.sigma > 0.0))
    throw ConfigError("step sizes must be positive");
  return p;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.iters < 0) throw ConfigError("--iters must be >= 0");
  if (cfg.mode == ParamMode::OracleSolution && cfg.solver == SolverChoice::Fista)
    throw ConfigError("fista has no solution-rate oracle");

  Setup s = build_problem(cfg);
  const ParameterSet params = choose_params(cfg, s.moduli);

  ExperimentResult result;
  result.table.columns = {"n",
                          "objective_error",
                          "solution_error",
                          "dual_error",
                          "feasibility_error",
                          "theory_global",
                          "theory_solution"};

  const RelaxationSide side = cfg.solver == SolverChoice::Opdhg
                                  ? RelaxationSide::Primal
                                  : RelaxationSide::Dual;
  if (cfg.solver != SolverChoice::Fista) {
    const Moduli sm = is_admm(cfg.solver) ? admm_saddle_moduli(s.moduli) : s.moduli;
    const auto doubled = validate_feasible(params, sm, side, true);
    if (!doubled && !cfg.allow_infeasible) {
      throw ConfigError(
          "parameters violate the convergence conditions (use "
          "--allow-infeasible to run anyway)");
    }
    if (doubled) {
      result.omega = doubled->omega;
      result.omega_tilde = doubled->omega_tilde;
    }
  } else {
    const double a = params.tau * s.moduli.gamma;
    result.omega = 1.0 - std::sqrt(a / (1.0 + a));
  }

  if (cfg.iters == 0) return result;

  RunOptions opts;
  opts.snapshot_stride = cfg.snapshot_stride;
  opts.allow_infeasible = cfg.allow_infeasible;
  const int n = cfg.iters;
  switch (cfg.solver) {
    case SolverChoice::Admm:
    case SolverChoice::AdmmAccel: {
      const AdmmInit init = default_admm_init(s.problem);
      result.trace = admm_run(s.problem, params.tau, *params.tau_prime, n,
                              init.x0, init.z0, init.y0, s.ref, opts);
      break;
    }
    case SolverChoice::Opdhg:
    case SolverChoice::OpdhgDual: {
      const SaddleProblem sp = s.problem.saddle();
      result.trace = opdhg_run(sp, params, side, n, Vector::Zero(sp.K.in_dim()),
                               Vector::Zero(sp.K.out_dim()), s.ref, opts);
      break;
    }
    case SolverChoice::Fista:
      result.trace = fista_run(
          s.problem, params.tau,
          cfg.fista_variable ? FistaSchedule::Variable : FistaSchedule::Constant,
          n, Vector::Zero(s.problem.A.in_dim()), s.ref, opts);
      break;
  }

  const auto& rows = result.trace.rows;
  double c_global = kNaN;
  double c_solution = kNaN;
  if (cfg.solver == SolverChoice::Fista) {
    if (rows.size() > 1 && std::isfinite(rows[1].objective_error) && result.omega)
      c_global = rows[1].objective_error / *result.omega;
  } else {
    const double P0 = rows.front().primal_error;
    const double D0 = rows.front().dual_error;
    const double tau = result.trace.params.tau;
    const double sigma = result.trace.params.sigma;
    const double c = side == RelaxationSide::Primal ? P0 + (tau / sigma) * D0
                                                    : D0 + (sigma / tau) * P0;
    c_global = c;
    c_solution = c;
  }

  for (const TraceRow& r : rows) {
    const double tg = result.omega ? c_global * std::pow(*result.omega, r.n) : kNaN;
    const double ts =
        result.omega_tilde ? c_solution * std::pow(*result.omega_tilde, r.n) : kNaN;
    result.table.rows.push_back({double(r.n), r.objective_error, r.solution_error,
                                 r.dual_error, r.feasibility_error, tg, ts});
  }
  return result;
}

}  // namespace pdcli
