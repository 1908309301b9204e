#pragma once

#include <pdaccel/image.hpp>
#include <pdaccel/solvers.hpp>
#include <pdaccel/tuning.hpp>

#include <optional>
#include <string>

namespace pdaccel {

/// min (M-m)/2 |K_N x|^2 + m/2 |x|^2 subject to x_0 = 1, split as
/// g(x) = m/2 |x|^2 + [x_0 = 1], h(z) = (M-m)/2 |z|^2, A = K_N.
struct ToyInstance {
  int N = 0;
  double m = 0.0;
  double M = 0.0;
  CompositeProblem problem;
  Moduli moduli;
  Vector x_star;
  Vector y_star;
  double f_star = 0.0;
  /// Residual |A x^ - b| of the reduced normal equations at the solution.
  double euler_residual = 0.0;

  Reference reference() const;
};

ToyInstance toy_build(int N, double m, double M);

/// Reduced objective of the toy problem as a function of x^ = (x_1..x_{N-1}).
double toy_reduced_objective(const ToyInstance& inst, const Vector& x_hat);

struct ReferenceSolution {
  Vector primal;
  Vector dual;
  double residual = 0.0;
  double tolerance = 1e-8;
  std::string solver;
  int iterations = 0;
  ParameterSet params;
};

/// min mu/2 |v - u|^2 + sum over pixels of huber(|grad v|), with all channel
/// differences of a pixel coupled into one magnitude.
struct DenoiseInstance {
  Image u;
  double mu = 0.0;
  CompositeProblem problem;
  Moduli moduli;
  std::optional<ReferenceSolution> reference;
  /// Relative tolerance of the conjugate-gradient x-update.
  double cg_tol = 1e-13;

  Reference as_reference() const;
};

DenoiseInstance denoise_build(const Image& u, double mu, double cg_tol = 1e-13);

/// Relative first-order residual of (v, y) for the saddle form, measured as
/// the distance to one oPDHG step with the oracle parameters.
double denoise_residual(const DenoiseInstance& inst, const Vector& v,
                        const Vector& y);

/// Long oPDHG run with opdhg_optimal parameters. Throws ConvergenceError
/// when the final residual exceeds `tolerance`.
ReferenceSolution reference_solution(const DenoiseInstance& inst,
                                     int budget = 2000,
                                     double tolerance = 1e-8);

/// Same stopping contract, accelerated ADMM with admm_accel_optimal steps.
ReferenceSolution reference_solution_admm(const DenoiseInstance& inst,
                                          int budget = 2000,
                                          double tolerance = 1e-8);

void save_reference(const ReferenceSolution& ref, const Image& u,
                    const std::string& path);
/// Throws FormatError on a bad header or size mismatch.
ReferenceSolution load_reference(const std::string& path, Image* dims = nullptr);

}  // namespace pdaccel
