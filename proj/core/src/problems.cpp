#include <pdaccel/problems.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pdaccel {

namespace {

// Tridiagonal (sub, diag, super) of K_n^* K_n for the half-difference
// operator on R^n; zero when n == 1.
struct Tridiag {
  Vector sub, diag, super;
};

Tridiag half_laplacian(Index n) {
  Tridiag t{Vector::Zero(std::max<Index>(n - 1, 0)), Vector::Zero(n),
            Vector::Zero(std::max<Index>(n - 1, 0))};
  for (Index i = 0; i + 1 < n; ++i) {
    t.diag[i] += 0.25;
    t.diag[i + 1] += 0.25;
    t.sub[i] = -0.25;
    t.super[i] = -0.25;
  }
  return t;
}

Vector tridiag_apply(const Tridiag& t, const Vector& x) {
  const Index n = t.diag.size();
  Vector out = t.diag.cwiseProduct(x);
  for (Index i = 0; i + 1 < n; ++i) {
    out[i] += t.super[i] * x[i + 1];
    out[i + 1] += t.sub[i] * x[i];
  }
  return out;
}

// K_n^* w for w in R^{n-1}.
Vector half_diff_adjoint(const Vector& w, Index n) {
  Vector out = Vector::Zero(n);
  for (Index i = 0; i + 1 < n; ++i) {
    out[i] -= 0.5 * w[i];
    out[i + 1] += 0.5 * w[i];
  }
  return out;
}

Vector half_diff(const Vector& x) {
  const Index n = x.size();
  Vector out(std::max<Index>(n - 1, 0));
  for (Index i = 0; i + 1 < n; ++i) out[i] = 0.5 * (x[i + 1] - x[i]);
  return out;
}

struct ToySystem {
  Tridiag mat;
  Vector rhs;
};

// Reduced normal equations of the pinned x-update (x = (1, x^)).
ToySystem toy_x_system(Index N, double m, const Vector& y, const Vector& z,
                       double tau) {
  const Index n = N - 1;
  ToySystem s{half_laplacian(n), Vector()};
  s.mat.diag /= tau;
  s.mat.sub /= tau;
  s.mat.super /= tau;
  s.mat.diag.array() += m;
  s.mat.diag[0] += 0.25 / tau;
  const Vector y_hat = y.tail(n - 1);
  const Vector z_hat = z.tail(n - 1);
  s.rhs = half_diff_adjoint(z_hat / tau - y_hat, n);
  s.rhs[0] += -0.5 * y[0] + 0.5 * z[0] / tau + 0.25 / tau;
  return s;
}

}  // namespace

Reference ToyInstance::reference() const {
  Reference r;
  r.primal = x_star;
  r.dual = y_star;
  r.f_star = f_star;
  r.objective = [p = problem](const Vector& x) { return p.objective(x); };
  return r;
}

ToyInstance toy_build(int N, double m, double M) {
  if (N < 2) throw std::invalid_argument("toy_build: N must be >= 2");
  if (!(m > 0.0) || !(M > m))
    throw std::invalid_argument("toy_build: need 0 < m < M");

  ToyInstance inst;
  inst.N = N;
  inst.m = m;
  inst.M = M;
  const double c = M - m;
  const Index n = N - 1;

  Tridiag a = half_laplacian(n);
  a.diag *= c;
  a.sub *= c;
  a.super *= c;
  a.diag.array() += m;
  a.diag[0] += 0.25 * c;
  Vector b = Vector::Zero(n);
  b[0] = 0.25 * c;
  const Vector x_hat = thomas_solve(a.sub, a.diag, a.super, b);
  inst.euler_residual = (tridiag_apply(a, x_hat) - b).norm();

  inst.x_star.resize(N);
  inst.x_star[0] = 1.0;
  inst.x_star.tail(n) = x_hat;

  LinearMap K = make_diff1d(N);
  const Vector kx = K.forward(inst.x_star);
  inst.y_star = c * kx;
  inst.f_star = 0.5 * c * kx.squaredNorm() + 0.5 * m * inst.x_star.squaredNorm();
  inst.moduli = {m, 1.0 / c, 1.0};

  const Index NN = N;
  inst.problem = CompositeProblem{
      pinned_quadratic(m, N, 0, 1.0),
      quadratic_l2(c, Vector::Zero(n)),
      scaled_quadratic_conjugate(c),
      K,
      [NN, m](const Vector& y, const Vector& z, double tau) {
        const ToySystem s = toy_x_system(NN, m, y, z, tau);
        Vector x(NN);
        x[0] = 1.0;
        x.tail(NN - 1) = thomas_solve(s.mat.sub, s.mat.diag, s.mat.super, s.rhs);
        return x;
      },
      [NN, m](const Vector& x, const Vector& y, const Vector& z, double tau) {
        const ToySystem s = toy_x_system(NN, m, y, z, tau);
        const Vector r = tridiag_apply(s.mat, x.tail(NN - 1)) - s.rhs;
        return r.norm() / std::max(1.0, s.rhs.norm());
      }};
  return inst;
}

double toy_reduced_objective(const ToyInstance& inst, const Vector& x_hat) {
  if (x_hat.size() != inst.N - 1)
    throw std::invalid_argument("toy_reduced_objective: dimension mismatch");
  const double c = inst.M - inst.m;
  const double first = x_hat[0] - 1.0;
  return 0.5 * c * (half_diff(x_hat).squaredNorm() + 0.25 * first * first) +
         0.5 * inst.m * (x_hat.squaredNorm() + 1.0);
}

Reference DenoiseInstance::as_reference() const {
  Reference r;
  r.objective = [p = problem](const Vector& x) { return p.objective(x); };
  if (reference) {
    r.primal = reference->primal;
    r.dual = reference->dual;
    r.f_star = problem.objective(reference->primal);
  }
  return r;
}

DenoiseInstance denoise_build(const Image& u, double mu, double cg_tol) {
  if (u.empty()) throw std::invalid_argument("denoise_build: empty image");
  if (!(mu > 0.0)) throw std::invalid_argument("denoise_build: mu must be > 0");

  DenoiseInstance inst;
  inst.u = u;
  inst.mu = mu;
  inst.cg_tol = cg_tol;
  const Index group = 2 * u.channels;
  LinearMap grad = make_grad2d(u.width, u.height, u.channels);
  inst.moduli = {mu, 1.0, grad.norm_bound()};

  auto normal_rhs = [grad, mu, data = u.data](const Vector& y, const Vector& z,
                                              double tau) {
    return Vector(mu * data + grad.adjoint(z / tau - y));
  };
  auto normal_op = [grad, mu](double tau) {
    return [grad, mu, tau](const Vector& v) {
      return Vector(mu * v + grad.adjoint(grad.forward(v)) / tau);
    };
  };

  inst.problem = CompositeProblem{
      quadratic_l2(mu, u.data),
      huber_sum(group),
      huber_conjugate(group),
      grad,
      [normal_rhs, normal_op, cg_tol](const Vector& y, const Vector& z,
                                      double tau) {
        return cg_solve(normal_op(tau), normal_rhs(y, z, tau), cg_tol, 5000);
      },
      [normal_rhs, normal_op](const Vector& v, const Vector& y, const Vector& z,
                              double tau) {
        const Vector b = normal_rhs(y, z, tau);
        return (normal_op(tau)(v) - b).norm() / std::max(1.0, b.norm());
      }};
  return inst;
}

double denoise_residual(const DenoiseInstance& inst, const Vector& v,
                        const Vector& y) {
  const Tuning t = opdhg_optimal(inst.moduli);
  const double tau = t.params.tau;
  const double sigma = t.params.sigma;
  const CompositeProblem& p = inst.problem;
  const double rv = (v - p.g->prox(v - tau * p.A.adjoint(y), tau)).norm();
  const double ry = (y - p.hstar->prox(y + sigma * p.A.forward(v), sigma)).norm();
  return (rv + ry) / std::max(1.0, v.norm() + y.norm());
}

namespace {

ReferenceSolution finish_reference(const DenoiseInstance& inst, Trace&& trace,
                                   const char* solver, int budget,
                                   double tolerance) {
  ReferenceSolution ref;
  ref.primal = std::move(trace.x);
  ref.dual = std::move(trace.y);
  ref.residual = denoise_residual(inst, ref.primal, ref.dual);
  ref.tolerance = tolerance;
  ref.solver = solver;
  ref.iterations = budget;
  ref.params = trace.params;
  if (!(ref.residual <= tolerance)) {
    std::ostringstream msg;
    msg << "reference_solution(" << solver << "): residual " << ref.residual
        << " after " << budget << " iterations exceeds " << tolerance;
    throw ConvergenceError(msg.str(), ref.residual, budget);
  }
  return ref;
}

}  // namespace

ReferenceSolution reference_solution(const DenoiseInstance& inst, int budget,
                                     double tolerance) {
  const Tuning t = opdhg_optimal(inst.moduli);
  RunOptions opts;
  opts.snapshot_stride = 0;
  const CompositeProblem& p = inst.problem;
  Trace trace = opdhg_run(p.saddle(), t.params, RelaxationSide::Primal, budget,
                          Vector::Zero(p.A.in_dim()),
                          Vector::Zero(p.A.out_dim()), {}, opts);
  return finish_reference(inst, std::move(trace), "opdhg", budget, tolerance);
}

ReferenceSolution reference_solution_admm(const DenoiseInstance& inst,
                                          int budget, double tolerance) {
  const Tuning t = admm_accel_optimal(inst.moduli);
  RunOptions opts;
  opts.snapshot_stride = 0;
  const AdmmInit init = default_admm_init(inst.problem);
  Trace trace = admm_run(inst.problem, t.params.tau, *t.params.tau_prime,
                         budget, init.x0, init.z0, init.y0, {}, opts);
  return finish_reference(inst, std::move(trace), "admm-accel", budget,
                          tolerance);
}

namespace {

constexpr char kRefMagic[8] = {'P', 'D', 'R', 'E', 'F', '0', '0', '1'};

void write_le(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

double read_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) throw FormatError("reference: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_reference(const ReferenceSolution& ref, const Image& u,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("reference: cannot open " + path);
  std::ostringstream hdr;
  hdr << std::setprecision(17);
  hdr << "width=" << u.width << '\n'
      << "height=" << u.height << '\n'
      << "channels=" << u.channels << '\n'
      << "solver=" << ref.solver << '\n'
      << "iterations=" << ref.iterations << '\n'
      << "tau=" << ref.params.tau << '\n'
      << "sigma=" << ref.params.sigma << '\n'
      << "theta=" << ref.params.theta << '\n'
      << "tau_prime=" << ref.params.tau_prime.value_or(0.0) << '\n'
      << "residual=" << ref.residual << '\n'
      << "tolerance=" << ref.tolerance << '\n'
      << "primal_size=" << ref.primal.size() << '\n'
      << "dual_size=" << ref.dual.size() << '\n'
      << "end\n";
  out.write(kRefMagic, 8);
  out << hdr.str();
  for (Index i = 0; i < ref.primal.size(); ++i) write_le(out, ref.primal[i]);
  for (Index i = 0; i < ref.dual.size(); ++i) write_le(out, ref.dual[i]);
  if (!out) throw FormatError("reference: write failed for " + path);
}

ReferenceSolution load_reference(const std::string& path, Image* dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("reference: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kRefMagic, 8) != 0)
    throw FormatError("reference: bad magic");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("reference: bad header line");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("reference: missing ") + key);
    return it->second;
  };
  ReferenceSolution ref;
  try {
    ref.solver = get("solver");
    ref.iterations = std::stoi(get("iterations"));
    ref.params.tau = std::stod(get("tau"));
    ref.params.sigma = std::stod(get("sigma"));
    ref.params.theta = std::stod(get("theta"));
    const double tp = std::stod(get("tau_prime"));
    if (tp > 0.0) ref.params.tau_prime = tp;
    ref.residual = std::stod(get("residual"));
    ref.tolerance = std::stod(get("tolerance"));
    const long np = std::stol(get("primal_size"));
    const long nd = std::stol(get("dual_size"));
    if (np < 0 || nd < 0) throw FormatError("reference: negative size");
    if (dims) {
      const int w = std::stoi(get("width"));
      const int h = std::stoi(get("height"));
      const int c = std::stoi(get("channels"));
      *dims = Image(w, h, c);
    }
    ref.primal.resize(np);
    ref.dual.resize(nd);
  } catch (const std::logic_error&) {
    throw FormatError("reference: malformed header value");
  }
  for (Index i = 0; i < ref.primal.size(); ++i) ref.primal[i] = read_le(in);
  for (Index i = 0; i < ref.dual.size(); ++i) ref.dual[i] = read_le(in);
  return ref;
}

}  // namespace pdaccel
