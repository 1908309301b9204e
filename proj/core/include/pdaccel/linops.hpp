#pragma once

#include <pdaccel/types.hpp>

#include <functional>
#include <string>

namespace pdaccel {

/// Matrix-free linear operator K : R^in_dim -> R^out_dim together with its
/// adjoint and an upper bound on the operator norm.
///
/// Instances are immutable once built; forward() and adjoint() are pure and
/// may be called concurrently.
class LinearMap {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  /// Placeholder with zero dimensions; applying it throws.
  LinearMap() = default;
  LinearMap(std::string name, Index in_dim, Index out_dim, Apply forward,
            Apply adjoint, double norm_bound);

  Vector forward(const Vector& x) const;
  Vector adjoint(const Vector& y) const;

  Index in_dim() const noexcept { return in_dim_; }
  Index out_dim() const noexcept { return out_dim_; }
  double norm_bound() const noexcept { return norm_bound_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_ = "unset";
  Index in_dim_ = 0;
  Index out_dim_ = 0;
  Apply forward_;
  Apply adjoint_;
  double norm_bound_ = 0.0;
};

LinearMap make_identity(Index n);

/// Half forward differences (Kx)_i = (x_{i+1} - x_i) / 2, i = 0..N-2.
/// Norm bound 1.
LinearMap make_diff1d(Index n);

/// Forward-difference gradient of an interleaved image with `channels`
/// values per pixel, row-major over (y, x). The last column has zero
/// x-difference and the last row zero y-difference.
///
/// Output is grouped per pixel: 2 * channels values, first the x-differences
/// of every channel, then the y-differences. Norm bound 2*sqrt(2).
LinearMap make_grad2d(Index nx, Index ny, Index channels);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
};

/// Power iteration on K*K. The estimate ||K v|| with ||v|| = 1 never exceeds
/// the true norm, so every iterate is a valid lower estimate.
///
/// Throws ConvergenceError (carrying the last estimate) when the relative
/// change does not drop below `tol` within `max_iters`.
NormEstimate estimate_norm(const LinearMap& map, int max_iters, double tol);

/// Runs a bounded power iteration and checks estimate <= norm_bound + slack.
/// Throws std::logic_error when the stored bound is violated.
double certify_norm_bound(const LinearMap& map, int iters = 200,
                          double slack = 1e-9);

/// Conjugate gradients for an SPD operator. Returns x with
/// ||Mx - b|| <= tol * ||b||; throws ConvergenceError with the final
/// residual norm when the budget runs out.
Vector cg_solve(const LinearMap::Apply& apply_spd, const Vector& b, double tol,
                int max_iters);
Vector cg_solve(const LinearMap::Apply& apply_spd, const Vector& b,
                const Vector& x0, double tol, int max_iters);

/// Thomas algorithm. `sub` and `super` have n-1 entries, `diag` and `b` n.
/// sub[i] couples row i+1 to column i; super[i] couples row i to column i+1.
Vector thomas_solve(const Vector& sub, const Vector& diag, const Vector& super,
                    const Vector& b);

}  // namespace pdaccel
