#include <pdaccel/linops.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pdaccel {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

// Deterministic start vector for power iteration. Entries in [-1, 1) from a
// splitmix64 stream with a fixed seed.
Vector power_start(Index n) {
  Vector v(n);
  std::uint64_t state = 0x5eed5eed5eed5eedULL;
  for (Index i = 0; i < n; ++i) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    v[i] = 2.0 * static_cast<double>(z >> 11) * 0x1.0p-53 - 1.0;
  }
  return v / v.norm();
}

struct PowerResult {
  double value;
  int iterations;
  bool converged;
};

PowerResult power_iterate(const LinearMap& map, int max_iters, double tol) {
  Vector v = power_start(map.in_dim());
  double estimate = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    const Vector w = map.forward(v);
    const double next = w.norm();
    if (next == 0.0) return {0.0, it, true};
    const Vector u = map.adjoint(w);
    const double unorm = u.norm();
    if (unorm == 0.0) return {next, it, true};
    v = u / unorm;
    const bool done = std::abs(next - estimate) <= tol * next;
    estimate = next;
    if (done) return {estimate, it, true};
  }
  return {estimate, max_iters, false};
}

}  // namespace

LinearMap::LinearMap(std::string name, Index in_dim, Index out_dim,
                     Apply forward, Apply adjoint, double norm_bound)
    : name_(std::move(name)),
      in_dim_(in_dim),
      out_dim_(out_dim),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      norm_bound_(norm_bound) {
  require(in_dim > 0 && out_dim > 0, "LinearMap: dimensions must be positive");
  require(norm_bound >= 0.0, "LinearMap: norm bound must be nonnegative");
}

Vector LinearMap::forward(const Vector& x) const {
  if (!forward_) throw std::logic_error("LinearMap: operator not set");
  if (x.size() != in_dim_)
    throw std::invalid_argument(name_ + ": forward dimension mismatch");
  return forward_(x);
}

Vector LinearMap::adjoint(const Vector& y) const {
  if (!adjoint_) throw std::logic_error("LinearMap: operator not set");
  if (y.size() != out_dim_)
    throw std::invalid_argument(name_ + ": adjoint dimension mismatch");
  return adjoint_(y);
}

LinearMap make_identity(Index n) {
  require(n >= 1, "make_identity: n must be >= 1");
  auto id = [](const Vector& x) { return Vector(x); };
  return LinearMap("identity", n, n, id, id, 1.0);
}

LinearMap make_diff1d(Index n) {
  require(n >= 2, "make_diff1d: N must be >= 2");
  auto fwd = [n](const Vector& x) {
    Vector out(n - 1);
    for (Index i = 0; i + 1 < n; ++i) out[i] = 0.5 * (x[i + 1] - x[i]);
    return out;
  };
  auto adj = [n](const Vector& y) {
    Vector out = Vector::Zero(n);
    for (Index i = 0; i + 1 < n; ++i) {
      out[i] -= 0.5 * y[i];
      out[i + 1] += 0.5 * y[i];
    }
    return out;
  };
  LinearMap map("diff1d", n, n - 1, fwd, adj, 1.0);
  certify_norm_bound(map);
  return map;
}

LinearMap make_grad2d(Index nx, Index ny, Index channels) {
  require(nx >= 1 && ny >= 1 && channels >= 1,
          "make_grad2d: dimensions must be >= 1");
  const Index c = channels;
  const Index pixels = nx * ny;
  auto fwd = [nx, ny, c, pixels](const Vector& v) {
    Vector g = Vector::Zero(2 * c * pixels);
    for (Index j = 0; j < ny; ++j) {
      for (Index i = 0; i < nx; ++i) {
        const Index p = j * nx + i;
        for (Index k = 0; k < c; ++k) {
          const double here = v[p * c + k];
          if (i + 1 < nx) g[p * 2 * c + k] = v[(p + 1) * c + k] - here;
          if (j + 1 < ny) g[p * 2 * c + c + k] = v[(p + nx) * c + k] - here;
        }
      }
    }
    return g;
  };
  auto adj = [nx, ny, c, pixels](const Vector& g) {
    Vector v = Vector::Zero(c * pixels);
    for (Index j = 0; j < ny; ++j) {
      for (Index i = 0; i < nx; ++i) {
        const Index p = j * nx + i;
        for (Index k = 0; k < c; ++k) {
          if (i + 1 < nx) {
            const double gx = g[p * 2 * c + k];
            v[p * c + k] -= gx;
            v[(p + 1) * c + k] += gx;
          }
          if (j + 1 < ny) {
            const double gy = g[p * 2 * c + c + k];
            v[p * c + k] -= gy;
            v[(p + nx) * c + k] += gy;
          }
        }
      }
    }
    return v;
  };
  LinearMap map("grad2d", c * pixels, 2 * c * pixels, fwd, adj,
                2.0 * std::sqrt(2.0));
  certify_norm_bound(map);
  return map;
}

NormEstimate estimate_norm(const LinearMap& map, int max_iters, double tol) {
  require(max_iters >= 1, "estimate_norm: max_iters must be >= 1");
  require(tol > 0.0, "estimate_norm: tol must be positive");
  const PowerResult r = power_iterate(map, max_iters, tol);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "estimate_norm(" << map.name() << "): no convergence after "
        << r.iterations << " iterations, last estimate " << r.value;
    throw ConvergenceError(msg.str(), r.value, r.iterations);
  }
  return {r.value, r.iterations};
}

double certify_norm_bound(const LinearMap& map, int iters, double slack) {
  const double est = power_iterate(map, iters, 1e-14).value;
  if (est > map.norm_bound() + slack) {
    std::ostringstream msg;
    msg << map.name() << ": power iteration estimate " << est
        << " exceeds stored norm bound " << map.norm_bound();
    throw std::logic_error(msg.str());
  }
  return est;
}

Vector cg_solve(const LinearMap::Apply& apply_spd, const Vector& b, double tol,
                int max_iters) {
  return cg_solve(apply_spd, b, Vector::Zero(b.size()), tol, max_iters);
}

Vector cg_solve(const LinearMap::Apply& apply_spd, const Vector& b,
                const Vector& x0, double tol, int max_iters) {
  require(tol > 0.0, "cg_solve: tol must be positive");
  require(x0.size() == b.size(), "cg_solve: initial guess dimension mismatch");
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  const double target = tol * bnorm;

  Vector x = x0;
  Vector r = b - apply_spd(x);
  double rr = r.squaredNorm();
  if (std::sqrt(rr) <= target) return x;
  Vector p = r;
  for (int it = 1; it <= max_iters; ++it) {
    const Vector mp = apply_spd(p);
    const double pmp = p.dot(mp);
    if (!(pmp > 0.0))
      throw std::invalid_argument("cg_solve: operator is not positive definite");
    const double alpha = rr / pmp;
    x += alpha * p;
    r -= alpha * mp;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= target) {
      // Recursive residuals drift; confirm against the true residual.
      const double true_res = (b - apply_spd(x)).norm();
      if (true_res <= target) return x;
      r = b - apply_spd(x);
      rr = r.squaredNorm();
      p = r;
      continue;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  const double res = (b - apply_spd(x)).norm();
  std::ostringstream msg;
  msg << "cg_solve: budget of " << max_iters
      << " iterations exhausted, residual " << res;
  throw ConvergenceError(msg.str(), res, max_iters);
}

Vector thomas_solve(const Vector& sub, const Vector& diag, const Vector& super,
                    const Vector& b) {
  const Index n = diag.size();
  require(n >= 1, "thomas_solve: empty system");
  require(b.size() == n && sub.size() == n - 1 && super.size() == n - 1,
          "thomas_solve: dimension mismatch");
  Vector c(n);
  Vector d(n);
  double pivot = diag[0];
  if (std::abs(pivot) <= std::numeric_limits<double>::min())
    throw SingularSystemError("thomas_solve: zero pivot at row 0");
  c[0] = n > 1 ? super[0] / pivot : 0.0;
  d[0] = b[0] / pivot;
  for (Index i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i - 1] * c[i - 1];
    if (std::abs(pivot) <= std::numeric_limits<double>::min()) {
      throw SingularSystemError("thomas_solve: zero pivot at row " +
                                std::to_string(i));
    }
    c[i] = i + 1 < n ? super[i] / pivot : 0.0;
    d[i] = (b[i] - sub[i - 1] * d[i - 1]) / pivot;
  }
  Vector x(n);
  x[n - 1] = d[n - 1];
  for (Index i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace pdaccel
