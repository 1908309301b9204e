#pragma once

#include <pdaccel/problems.hpp>
#include <pdaccel/solvers.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdcli {

enum class ProblemKind { Toy, Denoise };
enum class SolverChoice { Admm, AdmmAccel, Opdhg, OpdhgDual, Fista };
enum class ParamMode { OracleGlobal, OracleSolution, Manual };

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::Toy;
  int N = 15;
  double m = 0.1;
  double M = 10.0;

  std::string image_path;  // empty: synthetic image
  int synthetic_size = 32;
  int channels = 1;
  double mu = 10.0;
  double noise_std = 10.0;
  std::uint64_t seed = 42;
  int reference_budget = 2000;
  std::string reference_cache;
  double cg_tol = 1e-13;

  SolverChoice solver = SolverChoice::AdmmAccel;
  ParamMode mode = ParamMode::OracleGlobal;
  std::optional<double> tau, sigma, tau_prime, theta;
  bool allow_infeasible = false;
  bool fista_variable = false;

  int iters = 500;
  int snapshot_stride = 0;
};

/// Thrown for configurations that cannot run (bad parameter combinations,
/// infeasible manual steps without override). Maps to exit code 2.
class ConfigError : public pdaccel::Error {
 public:
  using pdaccel::Error::Error;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN renders as an empty cell
};

struct ExperimentResult {
  pdaccel::Trace trace;
  CsvTable table;
  std::optional<double> omega;        // rate used for theory_global
  std::optional<double> omega_tilde;  // rate used for theory_solution
};

SolverChoice parse_solver(const std::string& s);
ProblemKind parse_problem(const std::string& s);
ParamMode parse_mode(const std::string& s);
const char* solver_name(SolverChoice s);

/// Builds the problem, picks parameters, runs the solver, and assembles
/// the CSV table with theory overlays. With iters == 0 the table is empty.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace pdcli
