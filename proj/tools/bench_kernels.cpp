// Benchmark of the OpenMP kernels against their serial references, plus the
// sweep-level scaling of the steady-state engine.

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cqed/cumulant.hpp"
#include "cqed/dense.hpp"
#include "cqed/experiments.hpp"
#include "cqed/integrator.hpp"
#include "cqed/lindblad.hpp"

using namespace cqed;
using Clock = std::chrono::steady_clock;
using std::numbers::pi;

namespace {

double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

ComplexMatrix random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = cplx(g(rng), g(rng));
  return m;
}

template <class F>
double time_loop(F&& f, int reps) {
  f();  // warm up
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) f();
  return secs(t0, Clock::now()) / reps;
}

void bench_matmul() {
  std::printf("dense matmul: serial reference vs OpenMP rows\n");
  std::printf("%8s %12s %12s %9s %10s\n", "dim", "serial", "parallel", "speedup",
              "GF/s par");
  for (int n : {32, 64, 128, 256}) {
    const auto a = random_matrix(n, 1);
    const auto b = random_matrix(n, 2);
    ComplexMatrix c(n);
    const int reps = n <= 64 ? 400 : 30;
    const double ts = time_loop([&] { matmul_serial(a, b, c); }, reps);
    const double tp = time_loop([&] { matmul_parallel(a, b, c); }, reps);
    const double flops = 8.0 * n * double(n) * n;
    std::printf("%8d %10.2f us %10.2f us %8.2fx %9.2f\n", n, ts * 1e6, tp * 1e6,
                ts / tp, flops / tp / 1e9);
  }
}

void bench_liouvillian() {
  const SystemParams p = preset_oracle_check();
  std::printf("\nliouvillian apply (sparse kernels), N=2\n");
  std::printf("%8s %6s %12s %12s %9s\n", "cutoff", "dim", "serial", "parallel",
              "speedup");
  for (int cutoff : {15, 31, 63, 127}) {
    const HilbertLayout l{2, cutoff};
    const auto liou = build_liouvillian(p, l, 2 * pi * 45.0);
    const auto rho = product_state(l, 0.1, 0.05);
    ComplexMatrix out(l.dim());
    Liouvillian::Workspace ws;
    const int reps = l.dim() <= 200 ? 200 : 40;
    set_parallel_kernels(false);
    const double ts = time_loop([&] { liou.apply(rho.matrix(), out, ws); }, reps);
    set_parallel_kernels(true);
    const double tp = time_loop([&] { liou.apply(rho.matrix(), out, ws); }, reps);
    std::printf("%8d %6d %10.2f us %10.2f us %8.2fx\n", cutoff, l.dim(), ts * 1e6,
                tp * 1e6, ts / tp);
  }
}

void bench_rhs() {
  const SystemParams p = preset_fig3();
  const CumulantRhs rhs(p);
  std::array<cplx, slot::count> y{}, dy;
  y[slot::n] = 2269.0;
  y[slot::pe] = 0.15;
  const auto t0 = Clock::now();
  const long reps = 2'000'000;
  for (long r = 0; r < reps; ++r) rhs.eval(y.data(), 1e6, dy.data());
  const double t = secs(t0, Clock::now());
  std::printf("\ncumulant RHS: %.0f ns/eval (%.1f Mevals/s, serial by design)\n",
              t / reps * 1e9, reps / t / 1e6);
}

void bench_sweep() {
  std::printf("\nsteady-state sweep throughput (rabi-spectrum, 4 eta chains x 21)\n");
  auto spec = default_spec(ExperimentKind::rabi_spectrum);
  spec.sweep_points = 21;
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
#else
  const int hw = 1;
#endif
  for (int workers : {1, 2, std::max(2, hw)}) {
    spec.workers = workers;
    const auto t0 = Clock::now();
    const auto rep = run_rabi_spectrum(spec);
    const double t = secs(t0, Clock::now());
    std::printf("  workers=%d: %6.2f s (%d points, %d not converged)\n", workers, t,
                rep.diag.total_points, rep.diag.nonconverged_points);
  }
}

}  // namespace

int main() {
  bench_matmul();
  bench_liouvillian();
  bench_rhs();
  bench_sweep();
  return 0;
}
