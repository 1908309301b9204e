#pragma once

#include <pdaccel/types.hpp>

#include <memory>
#include <optional>
#include <string>

namespace pdaccel {

/// Proper closed convex function with a computable proximal map.
///
/// prox(x, t) = argmin_u { f(u) + ||u - x||^2 / (2t) }.
/// eval() returns kInfinity outside the domain of an indicator term; prox()
/// always returns a point of the domain.
class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  virtual std::string name() const = 0;
  virtual double eval(const Vector& x) const = 0;
  virtual Vector prox(const Vector& x, double step) const = 0;

  /// Modulus alpha of f(x2) >= f(x1) + <p, x2 - x1> + alpha/2 ||x2 - x1||^2.
  virtual double strong_convexity() const = 0;

  virtual bool has_gradient() const { return false; }
  /// Throws std::logic_error when the function is not differentiable.
  virtual Vector gradient(const Vector& x) const;
  virtual std::optional<double> lipschitz_gradient() const {
    return std::nullopt;
  }
};

using ProxFunctionPtr = std::shared_ptr<const ProxFunction>;

/// (weight/2) ||x - center||^2.
ProxFunctionPtr quadratic_l2(double weight, Vector center);

/// (weight/2) ||x||^2 plus the indicator of {x[pinned_index] = pinned_value}
/// on R^dim.
ProxFunctionPtr pinned_quadratic(double weight, Index dim, Index pinned_index,
                                 double pinned_value);

/// Sum over pixel groups of h0(|p_group|), with h0(s) = s^2/2 for s <= 1 and
/// s - 1/2 beyond. `group_size` is the number of components per pixel
/// (2 * channels for an image gradient field).
ProxFunctionPtr huber_sum(Index group_size = 2);

/// Conjugate of huber_sum: sum of |y_group|^2/2 plus the indicator of
/// |y_group| <= 1 for every group (up to 1e-12 for rounding).
ProxFunctionPtr huber_conjugate(Index group_size = 2);

/// ||y||^2 / (2 weight), the conjugate of (weight/2) ||.||^2.
ProxFunctionPtr scaled_quadratic_conjugate(double weight);

}  // namespace pdaccel
