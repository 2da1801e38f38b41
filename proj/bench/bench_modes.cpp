// Kernel-mode benchmark: serial reference drivers vs the OpenMP drivers on
// the two hot paths (direct scattering sweep, inverse-map reconstruction).
//
// The two modes are required to produce bitwise-identical output (per-node
// work is independent and scheduled statically), so next to the timings we
// print the max absolute difference, which must be exactly 0.
//
//   bench_modes [--n 1024] [--half-width 16] [--trials 3] [--threads 0]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>

#include "dnls/direct.hpp"
#include "dnls/evolution.hpp"
#include "dnls/inverse.hpp"
#include "dnls/spectral.hpp"

namespace {

using namespace dnls;
using clk = std::chrono::steady_clock;

double max_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Best-of-`trials` wall time of `fn` (first call included: plans and pools
// are warmed up by the correctness pass before timing starts).
template <class F>
double best_of(int trials, F&& fn) {
  double best = 1e300;
  for (int t = 0; t < trials; ++t) {
    const auto t0 = clk::now();
    fn();
    best = std::min(best,
                    std::chrono::duration<double>(clk::now() - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double openmp, double diff) {
  std::printf("%-22s %10.3f ms %10.3f ms %8.2fx %12.3e\n", name,
              1e3 * serial, 1e3 * openmp, serial / openmp, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP driver comparison"};
  std::size_t n = 1024;
  double half_width = 16.0;
  int trials = 3;
  int threads = 0;
  app.add_option("--n", n, "grid size (power of two)");
  app.add_option("--half-width", half_width, "domain half-width L");
  app.add_option("--trials", trials, "timed repetitions, best-of");
  app.add_option("--threads", threads, "cap OpenMP threads (0 = default)");
  CLI11_PARSE(app, argc, argv);
  set_max_threads(threads);

  const SpatialGrid g(half_width, n);
  const SpectralOps ops(g);
  Potential q0{g, cvec(g.N)};
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.x(j);
    q0.q[j] = 0.3 * std::exp(-x * x);
  }

  DirectOptions dser, domp;
  dser.exec = Exec::Serial;
  domp.exec = Exec::OpenMP;
  SolveOptions sser, somp;
  sser.exec = Exec::Serial;
  somp.exec = Exec::OpenMP;

  // Correctness pass (also warms FFTW plans and the thread pool).
  const DirectResult r_ser = scattering_coefficients(ops, q0, dser);
  const DirectResult r_omp = scattering_coefficients(ops, q0, domp);
  const double ddir = max_diff(r_ser.data.rho, r_omp.data.rho);
  const Potential i_ser = inverse_map(ops, r_omp.data, sser);
  const Potential i_omp = inverse_map(ops, r_omp.data, somp);
  const double dinv = max_diff(i_ser.q, i_omp.q);

  std::printf("grid: L = %g, N = M = %zu, trials = %d (best-of)\n\n",
              half_width, n, trials);
  std::printf("%-22s %13s %13s %9s %12s\n", "kernel", "serial", "openmp",
              "speedup", "max |diff|");

  const double t_dir_ser =
      best_of(trials, [&] { scattering_coefficients(ops, q0, dser); });
  const double t_dir_omp =
      best_of(trials, [&] { scattering_coefficients(ops, q0, domp); });
  row("direct sweep", t_dir_ser, t_dir_omp, ddir);

  const double t_inv_ser =
      best_of(trials, [&] { inverse_map(ops, r_omp.data, sser); });
  const double t_inv_omp =
      best_of(trials, [&] { inverse_map(ops, r_omp.data, somp); });
  row("inverse reconstruct", t_inv_ser, t_inv_omp, dinv);

  if (ddir != 0.0 || dinv != 0.0) {
    std::printf("\nmode outputs differ -- serial and OpenMP paths are "
                "required to agree bitwise\n");
    return 1;
  }
  return 0;
}
