#include <pdaccel/functions.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pdaccel {

Vector ProxFunction::gradient(const Vector&) const {
  throw std::logic_error(name() + " has no gradient");
}

namespace {

void require_step(double step) {
  if (!(step > 0.0)) throw std::invalid_argument("prox: step must be positive");
}

void require_groups(const Vector& x, Index group) {
  if (x.size() % group != 0)
    throw std::invalid_argument("size is not a multiple of the group size");
}

class QuadraticL2 final : public ProxFunction {
 public:
  QuadraticL2(double weight, Vector center)
      : weight_(weight), center_(std::move(center)) {}

  std::string name() const override { return "quadratic_l2"; }

  double eval(const Vector& x) const override {
    check(x);
    return 0.5 * weight_ * (x - center_).squaredNorm();
  }

  Vector prox(const Vector& x, double step) const override {
    check(x);
    require_step(step);
    return (x + step * weight_ * center_) / (1.0 + step * weight_);
  }

  double strong_convexity() const override { return weight_; }
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& x) const override {
    check(x);
    return weight_ * (x - center_);
  }
  std::optional<double> lipschitz_gradient() const override { return weight_; }

 private:
  void check(const Vector& x) const {
    if (x.size() != center_.size())
      throw std::invalid_argument("quadratic_l2: dimension mismatch");
  }

  double weight_;
  Vector center_;
};

class PinnedQuadratic final : public ProxFunction {
 public:
  PinnedQuadratic(double weight, Index dim, Index pin, double value)
      : weight_(weight), dim_(dim), pin_(pin), value_(value) {}

  std::string name() const override { return "pinned_quadratic"; }

  double eval(const Vector& x) const override {
    check(x);
    if (x[pin_] != value_) return kInfinity;
    return 0.5 * weight_ * x.squaredNorm();
  }

  Vector prox(const Vector& x, double step) const override {
    check(x);
    require_step(step);
    Vector out = x / (1.0 + step * weight_);
    out[pin_] = value_;
    return out;
  }

  double strong_convexity() const override { return weight_; }

 private:
  void check(const Vector& x) const {
    if (x.size() != dim_)
      throw std::invalid_argument("pinned_quadratic: dimension mismatch");
  }

  double weight_;
  Index dim_;
  Index pin_;
  double value_;
};

class HuberSum final : public ProxFunction {
 public:
  explicit HuberSum(Index group) : group_(group) {}

  std::string name() const override { return "huber_sum"; }

  double eval(const Vector& x) const override {
    require_groups(x, group_);
    double total = 0.0;
    for (Index p = 0; p < x.size(); p += group_) {
      const double s = x.segment(p, group_).norm();
      total += s <= 1.0 ? 0.5 * s * s : s - 0.5;
    }
    return total;
  }

  // Per group: magnitude s/(1+t) while that stays in the quadratic zone
  // (s <= 1+t), otherwise s - t. Direction is preserved; a zero group
  // stays zero.
  Vector prox(const Vector& x, double step) const override {
    require_groups(x, group_);
    require_step(step);
    Vector out(x.size());
    for (Index p = 0; p < x.size(); p += group_) {
      const auto seg = x.segment(p, group_);
      const double s = seg.norm();
      double scale;
      if (s <= 1.0 + step) {
        scale = 1.0 / (1.0 + step);
      } else {
        scale = (s - step) / s;
      }
      out.segment(p, group_) = scale * seg;
    }
    return out;
  }

  double strong_convexity() const override { return 0.0; }
  bool has_gradient() const override { return true; }

  Vector gradient(const Vector& x) const override {
    require_groups(x, group_);
    Vector out(x.size());
    for (Index p = 0; p < x.size(); p += group_) {
      const auto seg = x.segment(p, group_);
      const double s = seg.norm();
      out.segment(p, group_) = s <= 1.0 ? Vector(seg) : Vector(seg / s);
    }
    return out;
  }

  std::optional<double> lipschitz_gradient() const override { return 1.0; }

 private:
  Index group_;
};

class HuberConjugate final : public ProxFunction {
 public:
  explicit HuberConjugate(Index group) : group_(group) {}

  std::string name() const override { return "huber_conjugate"; }

  double eval(const Vector& y) const override {
    require_groups(y, group_);
    double total = 0.0;
    for (Index p = 0; p < y.size(); p += group_) {
      const double s2 = y.segment(p, group_).squaredNorm();
      if (s2 > 1.0 + 1e-12) return kInfinity;  // rounding after projection
      total += 0.5 * s2;
    }
    return total;
  }

  Vector prox(const Vector& y, double step) const override {
    require_groups(y, group_);
    require_step(step);
    Vector out = y / (1.0 + step);
    for (Index p = 0; p < y.size(); p += group_) {
      auto seg = out.segment(p, group_);
      const double s = seg.norm();
      if (s > 1.0) seg /= s;
    }
    return out;
  }

  double strong_convexity() const override { return 1.0; }

 private:
  Index group_;
};

class ScaledQuadraticConjugate final : public ProxFunction {
 public:
  explicit ScaledQuadraticConjugate(double weight) : weight_(weight) {}

  std::string name() const override { return "scaled_quadratic_conjugate"; }

  double eval(const Vector& y) const override {
    return y.squaredNorm() / (2.0 * weight_);
  }

  Vector prox(const Vector& y, double step) const override {
    require_step(step);
    return y * (weight_ / (weight_ + step));
  }

  double strong_convexity() const override { return 1.0 / weight_; }
  bool has_gradient() const override { return true; }
  Vector gradient(const Vector& y) const override { return y / weight_; }
  std::optional<double> lipschitz_gradient() const override {
    return 1.0 / weight_;
  }

 private:
  double weight_;
};

}  // namespace

ProxFunctionPtr quadratic_l2(double weight, Vector center) {
  if (!(weight > 0.0))
    throw std::invalid_argument("quadratic_l2: weight must be positive");
  return std::make_shared<QuadraticL2>(weight, std::move(center));
}

ProxFunctionPtr pinned_quadratic(double weight, Index dim, Index pinned_index,
                                 double pinned_value) {
  if (!(weight > 0.0))
    throw std::invalid_argument("pinned_quadratic: weight must be positive");
  if (pinned_index < 0 || pinned_index >= dim)
    throw std::out_of_range("pinned_quadratic: pinned index out of range");
  return std::make_shared<PinnedQuadratic>(weight, dim, pinned_index,
                                           pinned_value);
}

ProxFunctionPtr huber_sum(Index group_size) {
  if (group_size < 1)
    throw std::invalid_argument("huber_sum: group size must be >= 1");
  return std::make_shared<HuberSum>(group_size);
}

ProxFunctionPtr huber_conjugate(Index group_size) {
  if (group_size < 1)
    throw std::invalid_argument("huber_conjugate: group size must be >= 1");
  return std::make_shared<HuberConjugate>(group_size);
}

ProxFunctionPtr scaled_quadratic_conjugate(double weight) {
  if (!(weight > 0.0)) {
    throw std::invalid_argument(
        "scaled_quadratic_conjugate: weight must be positive");
  }
  return std::make_shared<ScaledQuadraticConjugate>(weight);
}

}  // namespace pdaccel
