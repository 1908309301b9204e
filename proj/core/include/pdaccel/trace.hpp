#pragma once

#include <pdaccel/tuning.hpp>
#include <pdaccel/types.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace pdaccel {

enum class SolverKind { OpdhgPrimal, OpdhgDual, Admm, Fista };

const char* solver_kind_name(SolverKind kind);

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// Scalars recorded at every iteration n (row 0 is the initial point).
/// Quantities that do not apply to a solver, or that need a reference that
/// was not supplied, are NaN.
struct TraceRow {
  int n = 0;
  double objective_error = kUndefined;
  double solution_error = kUndefined;     // ||x_n - x*||^2
  double dual_error = kUndefined;         // ||y_n - y*||^2
  double feasibility_error = kUndefined;  // ||A x_n - z_n||, ADMM only
  /// Squared distance of the saddle-point primal variable to its optimum.
  /// Equals solution_error for oPDHG and FISTA; for ADMM it is
  /// ||A x_n - A x*||^2 (and ||z_0 - A x*||^2 at n = 0).
  double primal_error = kUndefined;
};

struct Snapshot {
  int n = 0;
  Vector x;
  Vector z;   // ADMM only
  Vector y;   // empty for FISTA
  Vector ax;  // A x_n, ADMM only
};

/// Running omega-weighted averages of the primal and dual iterates.
class Ergodic {
 public:
  /// Throws std::invalid_argument unless 0 < omega <= 1.
  explicit Ergodic(double omega);

  void add(const Vector& primal, const Vector& dual);

  double omega() const noexcept { return omega_; }
  int count() const noexcept { return count_; }
  const Vector& primal() const noexcept { return primal_; }
  const Vector& dual() const noexcept { return dual_; }
  /// Sum of 1/omega^(n-1) over n = 1..count, in closed form.
  double weight_total() const { return ergodic_weight_total(omega_, count_); }

  /// Recursion weight of the N-th term, (1 - omega) / (1 - omega^N).
  static double step_weight(double omega, int n);
  static double ergodic_weight_total(double omega, int n);

 private:
  double omega_;
  int count_ = 0;
  Vector primal_;
  Vector dual_;
};

struct Trace {
  SolverKind kind = SolverKind::OpdhgPrimal;
  ParameterSet params;
  /// Operator norm of the saddle-point coupling (1 for ADMM, which couples
  /// through the identity).
  double coupling_norm = 1.0;
  int snapshot_stride = 1;
  std::vector<TraceRow> rows;
  std::vector<Snapshot> snapshots;
  std::optional<Ergodic> ergodic;
  Vector x;
  Vector y;
  Vector z;
};

/// Appends the pair to the trace's accumulator, creating it on first use.
void ergodic_update(Trace& trace, const Vector& primal, const Vector& dual,
                    double omega);

}  // namespace pdaccel
