#include <pdaccel/trace.hpp>

#include <cmath>
#include <stdexcept>

namespace pdaccel {

const char* solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::OpdhgPrimal: return "opdhg";
    case SolverKind::OpdhgDual: return "opdhg-dual";
    case SolverKind::Admm: return "admm";
    case SolverKind::Fista: return "fista";
  }
  return "unknown";
}

Ergodic::Ergodic(double omega) : omega_(omega) {
  if (!(omega > 0.0 && omega <= 1.0))
    throw std::invalid_argument("Ergodic: omega must lie in (0, 1]");
}

double Ergodic::step_weight(double omega, int n) {
  if (n < 1) throw std::invalid_argument("Ergodic: n must be >= 1");
  if (omega == 1.0) return 1.0 / n;
  const double lw = std::log(omega);
  return std::expm1(lw) / std::expm1(n * lw);
}

double Ergodic::ergodic_weight_total(double omega, int n) {
  if (n <= 0) return 0.0;
  if (omega == 1.0) return n;
  const double lw = std::log(omega);
  return std::expm1(n * lw) / (std::exp((n - 1) * lw) * std::expm1(lw));
}

void Ergodic::add(const Vector& primal, const Vector& dual) {
  ++count_;
  if (count_ == 1) {
    primal_ = primal;
    dual_ = dual;
    return;
  }
  if (primal.size() != primal_.size() || dual.size() != dual_.size())
    throw std::invalid_argument("Ergodic: dimension mismatch");
  const double w = step_weight(omega_, count_);
  primal_ = (1.0 - w) * primal_ + w * primal;
  dual_ = (1.0 - w) * dual_ + w * dual;
}

void ergodic_update(Trace& trace, const Vector& primal, const Vector& dual,
                    double omega) {
  if (!trace.ergodic) {
    trace.ergodic.emplace(omega);
  } else if (trace.ergodic->omega() != omega) {
    throw std::invalid_argument("ergodic_update: omega changed mid-run");
  }
  trace.ergodic->add(primal, dual);
}

}  // namespace pdaccel
