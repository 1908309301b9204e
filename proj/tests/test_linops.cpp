#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <pdaccel/linops.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace pdaccel;

namespace {

Vector randn(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

double adjoint_gap(const LinearMap& K, std::mt19937_64& rng) {
  const Vector x = randn(rng, K.in_dim());
  const Vector y = randn(rng, K.out_dim());
  return std::abs(K.forward(x).dot(y) - x.dot(K.adjoint(y))) / (x.norm() * y.norm());
}

}  // namespace

TEST_CASE("diff1d matches the half forward difference") {
  const LinearMap K = make_diff1d(4);
  Vector x(4);
  x << 1.0, 3.0, 2.0, 6.0;
  const Vector kx = K.forward(x);
  REQUIRE(kx.size() == 3);
  CHECK(kx[0] == doctest::Approx(1.0));
  CHECK(kx[1] == doctest::Approx(-0.5));
  CHECK(kx[2] == doctest::Approx(2.0));
  CHECK(K.norm_bound() == 1.0);
}

TEST_CASE("diff1d rejects N < 2") {
  CHECK_THROWS_AS(make_diff1d(1), std::invalid_argument);
}

TEST_CASE("grad2d on a 2x2 ramp") {
  // v(i, j) = i + 10 j, single channel.
  const LinearMap G = make_grad2d(2, 2, 1);
  Vector v(4);
  v << 0.0, 1.0, 10.0, 11.0;
  const Vector g = G.forward(v);
  REQUIRE(g.size() == 8);
  // pixel (0,0): dx = 1, dy = 10; pixel (1,0): dx = 0 (last column), dy = 10
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 10.0);
  CHECK(g[2] == 0.0);
  CHECK(g[3] == 10.0);
  // bottom row: dy = 0
  CHECK(g[4] == 1.0);
  CHECK(g[5] == 0.0);
  CHECK(g[6] == 0.0);
  CHECK(g[7] == 0.0);
}

TEST_CASE("grad2d groups channel differences per pixel") {
  const LinearMap G = make_grad2d(2, 1, 3);
  Vector v(6);
  v << 1, 2, 3, 4, 6, 8;
  const Vector g = G.forward(v);
  REQUIRE(g.size() == 12);
  CHECK(g[0] == 3.0);
  CHECK(g[1] == 4.0);
  CHECK(g[2] == 5.0);
  for (int k = 3; k < 12; ++k) CHECK(g[k] == 0.0);
}

TEST_CASE("adjointness of every operator") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(adjoint_gap(make_diff1d(2 + trial * 5), rng) <= 1e-12);
    CHECK(adjoint_gap(make_grad2d(1 + trial, 2 + trial % 3, 1 + trial % 3), rng) <= 1e-12);
    CHECK(adjoint_gap(make_identity(3 + trial), rng) <= 1e-15);
  }
}

TEST_CASE("constant signals lie in the kernel") {
  CHECK(make_diff1d(8).forward(Vector::Constant(8, 2.5)).norm() == 0.0);
  CHECK(make_grad2d(4, 3, 2).forward(Vector::Constant(24, -1.0)).norm() == 0.0);
}

TEST_CASE("power iteration stays below the certified bounds") {
  const NormEstimate e1 = estimate_norm(make_diff1d(50), 10000, 1e-12);
  CHECK(e1.value <= 1.0 + 1e-9);
  CHECK(e1.value > 0.99);  // |K_N| = cos(pi / (2N)) -> 1
  CHECK(e1.value == doctest::Approx(std::cos(M_PI / 100.0)).epsilon(1e-6));
  const NormEstimate e2 = estimate_norm(make_grad2d(20, 20, 1), 10000, 1e-12);
  CHECK(e2.value <= 2.0 * std::sqrt(2.0) + 1e-9);
  CHECK(e2.value > 2.7);
  CHECK(estimate_norm(make_identity(5), 10, 1e-12).value == doctest::Approx(1.0));
}

TEST_CASE("power iteration reports non-convergence with its last estimate") {
  try {
    estimate_norm(make_diff1d(200), 2, 1e-15);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.last_value() > 0.0);
    CHECK(e.last_value() <= 1.0);
  }
}

TEST_CASE("a wrong stored bound is caught") {
  const LinearMap K = make_diff1d(30);
  const LinearMap lying("lying", 30, 29, [&](const Vector& x) { return Vector(3.0 * K.forward(x)); },
                        [&](const Vector& y) { return Vector(3.0 * K.adjoint(y)); }, 1.0);
  CHECK_THROWS_AS(certify_norm_bound(lying), std::logic_error);
}

TEST_CASE("dimension checks") {
  const LinearMap K = make_diff1d(5);
  CHECK_THROWS_AS(K.forward(Vector::Zero(4)), std::invalid_argument);
  CHECK_THROWS_AS(K.adjoint(Vector::Zero(5)), std::invalid_argument);
  const LinearMap unset;
  CHECK_THROWS_AS(unset.forward(Vector()), std::logic_error);
}

TEST_CASE("cg_solve on an SPD tridiagonal system") {
  const Index n = 30;
  auto apply = [n](const Vector& x) {
    Vector y = 4.0 * x;
    for (Index i = 0; i + 1 < n; ++i) {
      y[i] -= x[i + 1];
      y[i + 1] -= x[i];
    }
    return y;
  };
  std::mt19937_64 rng(11);
  const Vector x_true = randn(rng, n);
  const Vector b = apply(x_true);
  const Vector x = cg_solve(apply, b, 1e-12, 200);
  CHECK((apply(x) - b).norm() <= 1e-12 * b.norm());
  CHECK((x - x_true).norm() <= 1e-10 * x_true.norm());
  CHECK(cg_solve(apply, Vector::Zero(n), 1e-12, 10).norm() == 0.0);
}

TEST_CASE("cg_solve budget and definiteness errors") {
  auto lap = [](const Vector& x) {
    Vector y = 2.0 * x;
    for (Index i = 0; i + 1 < x.size(); ++i) {
      y[i] -= x[i + 1];
      y[i + 1] -= x[i];
    }
    return y;
  };
  const Vector b = Vector::Ones(200);
  try {
    cg_solve(lap, b, 1e-14, 3);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_value() > 0.0);
    CHECK(e.iterations() == 3);
  }
  auto neg = [](const Vector& x) { return Vector(-x); };
  CHECK_THROWS_AS(cg_solve(neg, b, 1e-10, 10), std::invalid_argument);
}

TEST_CASE("thomas_solve matches a dense solve") {
  Vector sub(3), diag(4), super(3), b(4);
  sub << 1, 2, 3;
  diag << 5, 6, 7, 8;
  super << -1, -2, -3;
  b << 1, 2, 3, 4;
  const Vector x = thomas_solve(sub, diag, super, b);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) A(i, i) = diag[i];
  for (int i = 0; i < 3; ++i) {
    A(i + 1, i) = sub[i];
    A(i, i + 1) = super[i];
  }
  CHECK((A * x - b).norm() <= 1e-14);
}

TEST_CASE("thomas_solve reports a zero pivot") {
  Vector sub(1), diag(2), super(1), b(2);
  sub << 1;
  diag << 0, 1;
  super << 1;
  b << 1, 1;
  CHECK_THROWS_AS(thomas_solve(sub, diag, super, b), SingularSystemError);
  CHECK_THROWS_AS(thomas_solve(Vector(2), diag, super, b), std::invalid_argument);
}

TEST_CASE("cg_solve small examples") {
  auto id = [](const Vector& x) { return x; };
  Vector b(3);
  b << 1.0, -2.0, 0.5;
  CHECK((cg_solve(id, b, 1e-14, 5) - b).norm() <= 1e-15);
  auto diag = [](const Vector& x) {
    Vector y(2);
    y << 2.0 * x[0], 4.0 * x[1];
    return y;
  };
  Vector b2(2);
  b2 << 2.0, 4.0;
  const Vector x = cg_solve(diag, b2, 1e-14, 5);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("cg_solve on mu I + grad* grad / tau matches a dense solve") {
  const LinearMap G = make_grad2d(4, 4, 1);
  const double mu = 10.0, tau = 0.7;
  auto op = [&](const Vector& v) { return Vector(mu * v + G.adjoint(G.forward(v)) / tau); };
  Eigen::MatrixXd M(16, 16);
  for (Index j = 0; j < 16; ++j) M.col(j) = op(Vector::Unit(16, j));
  std::mt19937_64 rng(41);
  const Vector b = randn(rng, 16);
  const Vector dense = M.ldlt().solve(b);
  CHECK((cg_solve(op, b, 1e-14, 200) - dense).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("thomas_solve small examples") {
  Vector one(1), diag(3), b(3);
  diag << 1, 1, 1;
  b << 4, 5, 6;
  const Vector zeros = Vector::Zero(2);
  CHECK((thomas_solve(zeros, diag, zeros, b) - b).norm() == 0.0);
  Vector s(1), d(2), r(2);
  s << 1;
  d << 2, 2;
  r << 3, 3;
  const Vector x = thomas_solve(s, d, s, r);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("diff1d small examples and exact norm") {
  const LinearMap K = make_diff1d(2);
  Vector x(2);
  x << 1.0, 3.0;
  CHECK(K.forward(x)[0] == 1.0);
  CHECK(K.forward(Vector::Zero(2))[0] == 0.0);
  CHECK(estimate_norm(K, 100, 1e-14).value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  const LinearMap G = make_grad2d(2, 1, 1);
  Vector v(2);
  v << 0.0, 1.0;
  const Vector g = G.forward(v);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK(g[3] == 0.0);
  CHECK(G.adjoint(Vector::Zero(4)).norm() == 0.0);
}
