#include <pdaccel/linops.hpp>
#include <pdaccel/problems.hpp>
#include <pdaccel/solvers.hpp>

#include <benchmark/benchmark.h>

using namespace pdaccel;

namespace {

DenoiseInstance denoise(int size) {
  return denoise_build(add_gaussian_noise(synthetic_image(size, size, 1), 10.0, 42), 10.0);
}

void BM_Grad2dForwardAdjoint(benchmark::State& state) {
  const Index n = state.range(0);
  const LinearMap G = make_grad2d(n, n, 3);
  const Vector v = Vector::LinSpaced(G.in_dim(), 0.0, 255.0);
  for (auto _ : state) benchmark::DoNotOptimize(G.adjoint(G.forward(v)));
  state.SetItemsProcessed(state.iterations() * G.in_dim());
}
BENCHMARK(BM_Grad2dForwardAdjoint)->Arg(32)->Arg(128)->Arg(512);

void BM_DenoiseXUpdate(benchmark::State& state) {
  const DenoiseInstance d = denoise(static_cast<int>(state.range(0)));
  const Tuning t = admm_accel_optimal(d.moduli);
  const Vector y = Vector::Zero(d.problem.A.out_dim());
  const Vector z = d.problem.A.forward(d.u.data);
  for (auto _ : state) benchmark::DoNotOptimize(d.problem.x_update(y, z, t.params.tau));
}
BENCHMARK(BM_DenoiseXUpdate)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ToyThomas(benchmark::State& state) {
  const Index n = state.range(0);
  const Vector sub = Vector::Constant(n - 1, -0.25), diag = Vector::Constant(n, 1.5);
  const Vector b = Vector::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(thomas_solve(sub, diag, sub, b));
}
BENCHMARK(BM_ToyThomas)->Arg(15)->Arg(1000);

void BM_ToySolvers(benchmark::State& state) {
  const ToyInstance toy = toy_build(15, 0.1, 10.0);
  const int which = static_cast<int>(state.range(0));
  RunOptions opts;
  opts.snapshot_stride = 0;
  const AdmmInit init = default_admm_init(toy.problem);
  for (auto _ : state) {
    Trace t;
    switch (which) {
      case 0: {
        const ParameterSet p = admm_accel_optimal(toy.moduli).params;
        t = admm_run(toy.problem, p.tau, *p.tau_prime, 500, init.x0, init.z0, init.y0,
                     toy.reference(), opts);
        break;
      }
      case 1:
        t = opdhg_run(toy.problem.saddle(), opdhg_optimal(toy.moduli).params,
                      RelaxationSide::Primal, 500, init.x0, init.y0, toy.reference(), opts);
        break;
      default:
        t = fista_run(toy.problem, fista_params(toy.moduli).tau, FistaSchedule::Constant, 500,
                      init.x0, toy.reference(), opts);
    }
    benchmark::DoNotOptimize(t.x.data());
  }
  state.SetLabel(which == 0 ? "admm-accel" : which == 1 ? "opdhg" : "fista");
}
BENCHMARK(BM_ToySolvers)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_DenoiseOpdhgIterations(benchmark::State& state) {
  const DenoiseInstance d = denoise(static_cast<int>(state.range(0)));
  const Tuning t = opdhg_optimal(d.moduli);
  RunOptions opts;
  opts.snapshot_stride = 0;
  for (auto _ : state) {
    const Trace tr = opdhg_run(d.problem.saddle(), t.params, RelaxationSide::Primal, 100,
                               Vector::Zero(d.problem.A.in_dim()),
                               Vector::Zero(d.problem.A.out_dim()), {}, opts);
    benchmark::DoNotOptimize(tr.x.data());
  }
}
BENCHMARK(BM_DenoiseOpdhgIterations)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
