// Wall-clock comparison of the serial reference kernels and their OpenMP
// counterparts. Set OMP_NUM_THREADS to vary the thread count.

#include "infodiv/kernels.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

using namespace infodiv;
using kernels::Atom;

namespace {

std::vector<Atom> random_atoms(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> t(0, 50), m(0.01, 1);
  std::vector<Atom> a(n);
  Real total = 0;
  for (auto& x : a) total += (x.mass = m(rng)), x.t = t(rng);
  for (auto& x : a) x.mass /= total;
  return kernels::sort_merge(std::move(a));
}

double best_of(int reps, const std::function<std::size_t()>& f, std::size_t& out_size) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    out_size = f();
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convolution kernel timings"};
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::size_t bins = 4096;
  int reps = 3;
  std::uint64_t seed = 1;
  app.add_option("--sizes", sizes, "atoms per operand");
  app.add_option("--bins", bins, "grid size of the binned kernels");
  app.add_option("--reps", reps, "repetitions, best time is reported");
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::printf("threads %d\n", omp_get_max_threads());
  std::printf("%8s %-16s %12s %10s\n", "atoms", "kernel", "seconds", "out");
  for (std::size_t n : sizes) {
    auto a = random_atoms(rng, n), b = random_atoms(rng, n);
    std::vector<Real> grid;
    for (std::size_t i = 0; i < bins; ++i) grid.push_back(100.0L * i / bins);
    struct Row {
      const char* name;
      std::function<std::size_t()> run;
    };
    std::vector<Row> rows{
        {"exact/serial", [&] { return kernels::convolve_serial(a, b).size(); }},
        {"exact/parallel", [&] { return kernels::convolve_parallel(a, b).size(); }},
        {"binned/serial",
         [&] { return kernels::convolve_binned_serial(a, b, bins, kernels::Rounding::down).size(); }},
        {"binned/parallel",
         [&] { return kernels::convolve_binned_parallel(a, b, bins, kernels::Rounding::down).size(); }},
        {"snapped", [&] { return kernels::convolve_snapped(a, b, grid, 0, 1e-12L).size(); }},
    };
    for (const auto& row : rows) {
      std::size_t out = 0;
      double s = best_of(reps, row.run, out);
      std::printf("%8zu %-16s %12.6f %10zu\n", n, row.name, s, out);
    }
  }
  return 0;
}
