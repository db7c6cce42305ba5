// Serial reference against the OpenMP path for the hot kernels. Run with
// OMP_NUM_THREADS set to compare thread counts.
#include <cmath>

#include <benchmark/benchmark.h>

#include "nld/dynamics.hpp"
#include "nld/grid.hpp"
#include "nld/nonlinearity.hpp"

using namespace nld;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

Real4 wave(size_t n, double h) {
  Real4 s(n);
  for (size_t i = 0; i < n; ++i) {
    const double x = -0.5 * h * static_cast<double>(n) + h * static_cast<double>(i);
    for (size_t c = 0; c < 4; ++c) s.q[c][i] = 0.3 * std::exp(-x * x / (1.0 + c)) * std::cos((1.0 + c) * x);
  }
  return s;
}

void label(benchmark::State& st) {
  st.SetLabel(st.range(1) ? "parallel" : "serial");
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_deriv1(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid1D g(-200, 200, n);
  const RealField f = wave(static_cast<size_t>(n), g.h).q[0];
  for (auto _ : st) benchmark::DoNotOptimize(deriv1(g, f, exec_of(st)));
  label(st);
}

void BM_rhs_lab(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid1D g(-200, 200, n);
  const Real4 s = wave(static_cast<size_t>(n), g.h);
  const NonlinearityModel m = builtin("thirring");
  for (auto _ : st) benchmark::DoNotOptimize(rhs_lab(g, s, m, 1.0, exec_of(st)));
  label(st);
}

void BM_rhs_spinor(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid1D g(-200, 200, n);
  const Real4 s = wave(static_cast<size_t>(n), g.h);
  const NonlinearityModel m = builtin("quartic_harmonic");
  for (auto _ : st) benchmark::DoNotOptimize(rhs_spinor(g, s, m, 1.0, exec_of(st)));
  label(st);
}

void BM_rhs_radial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const RadialGrid g(100, n);
  const Real4 s = wave(static_cast<size_t>(n), g.h);
  const NonlinearityModel m = builtin("soler_radial");
  for (auto _ : st) benchmark::DoNotOptimize(rhs_radial(g, s, m, 1.0, exec_of(st)));
  label(st);
}

void BM_rk4_lab(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid1D g(-200, 200, n);
  const auto sys = DiracSystem::lab(g, builtin("thirring"), 1.0, exec_of(st));
  const Real4 s = wave(static_cast<size_t>(n), g.h);
  IntegrateOptions opt;
  opt.dt = 0.5 * g.h;
  opt.t_end = 10 * opt.dt;
  opt.sample_stride = 10;
  opt.keep_states = false;
  opt.check_boundary = false;
  for (auto _ : st) benchmark::DoNotOptimize(integrate(sys, s, 0.0, opt));
  label(st);
}

void sizes_1d(benchmark::internal::Benchmark* b) {
  for (int n : {2001, 8001, 32001})
    for (int p : {0, 1}) b->Args({n, p});
}

void sizes_radial(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 4000, 16000})
    for (int p : {0, 1}) b->Args({n, p});
}

}  // namespace

BENCHMARK(BM_deriv1)->Apply(sizes_1d);
BENCHMARK(BM_rhs_lab)->Apply(sizes_1d);
BENCHMARK(BM_rhs_spinor)->Apply(sizes_1d);
BENCHMARK(BM_rhs_radial)->Apply(sizes_radial);
BENCHMARK(BM_rk4_lab)->Apply(sizes_1d)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
