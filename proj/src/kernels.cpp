#include "infodiv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace infodiv::kernels {

std::vector<Atom> sort_merge(std::vector<Atom> atoms, Real tol) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.t < y.t; });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) {
    if (a.mass == 0) continue;
    if (!out.empty() && a.t - out.back().t <= merge_width(out.back().t, tol)) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

std::vector<Atom> convolve_serial(std::span<const Atom> a, std::span<const Atom> b, Real tol) {
  std::vector<Atom> all;
  all.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) all.push_back({x.t + y.t, x.mass * y.mass});
  return sort_merge(std::move(all), tol);
}

namespace {

// Merges two sorted, merged atom lists, combining atoms within tol.
std::vector<Atom> merge_two(const std::vector<Atom>& x, const std::vector<Atom>& y, Real tol) {
  std::vector<Atom> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    const Atom& next = (j >= y.size() || (i < x.size() && x[i].t <= y[j].t)) ? x[i++] : y[j++];
    if (!out.empty() && next.t - out.back().t <= merge_width(out.back().t, tol)) {
      out.back().mass += next.mass;
    } else {
      out.push_back(next);
    }
  }
  return out;
}

}  // namespace

std::vector<Atom> convolve_parallel(std::span<const Atom> a, std::span<const Atom> b, Real tol) {
  if (a.size() < b.size()) std::swap(a, b);
  int chunks = 1;
#ifdef _OPENMP
  chunks = std::max(1, omp_get_max_threads());
#endif
  chunks = static_cast<int>(std::min<std::size_t>(chunks, a.size()));
  std::vector<std::vector<Atom>> parts(chunks);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    std::size_t lo = a.size() * c / chunks, hi = a.size() * (c + 1) / chunks;
    std::vector<Atom> local;
    local.reserve((hi - lo) * b.size());
    for (std::size_t i = lo; i < hi; ++i)
      for (const auto& y : b) local.push_back({a[i].t + y.t, a[i].mass * y.mass});
    parts[c] = sort_merge(std::move(local), tol);
  }
  while (parts.size() > 1) {
    std::vector<std::vector<Atom>> next((parts.size() + 1) / 2);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (2 * i + 1 < parts.size()) next[i] = merge_two(parts[2 * i], parts[2 * i + 1], tol);
      else next[i] = std::move(parts[2 * i]);
    }
    parts = std::move(next);
  }
  // Chunk-local merging can leave neighbours within tol across chunks.
  return sort_merge(std::move(parts[0]), tol);
}

namespace {

struct Grid {
  Real lo, step;
  std::size_t points;
  Rounding rounding;

  std::size_t index(Real t) const {
    Real x = (t - lo) / step;
    Real i = rounding == Rounding::up ? std::ceil(x) : std::floor(x);
    return static_cast<std::size_t>(std::clamp<Real>(i, 0, static_cast<Real>(points - 1)));
  }
  // Grid points computed from the nearer end so the extremes stay exact.
  Real at(std::size_t i, Real hi) const {
    return i + 1 == points ? hi : lo + static_cast<Real>(i) * step;
  }
};

std::vector<Atom> collect(const std::vector<Real>& mass, const Grid& g, Real hi) {
  std::vector<Atom> out;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0) out.push_back({g.at(i, hi), mass[i]});
  return out;
}

bool make_grid(std::span<const Atom> a, std::span<const Atom> b, std::size_t max_atoms, Rounding rounding, Grid& g,
               Real& hi) {
  if (rounding == Rounding::none || max_atoms < 2) throw std::invalid_argument("convolve_binned: needs a rounding");
  Real lo = a.front().t + b.front().t;
  hi = a.back().t + b.back().t;
  g = {lo, (hi - lo) / static_cast<Real>(max_atoms - 1), max_atoms, rounding};
  return g.step > 0;
}

}  // namespace

std::vector<Atom> convolve_binned_serial(std::span<const Atom> a, std::span<const Atom> b, std::size_t max_atoms,
                                         Rounding rounding) {
  if (a.empty() || b.empty()) return {};
  Grid g;
  Real hi;
  if (!make_grid(a, b, max_atoms, rounding, g, hi)) return convolve_serial(a, b);
  std::vector<Real> mass(max_atoms, 0);
  for (const auto& x : a)
    for (const auto& y : b) mass[g.index(x.t + y.t)] += x.mass * y.mass;
  return collect(mass, g, hi);
}

std::vector<Atom> convolve_binned_parallel(std::span<const Atom> a, std::span<const Atom> b, std::size_t max_atoms,
                                           Rounding rounding) {
  if (a.empty() || b.empty()) return {};
  Grid g;
  Real hi;
  if (!make_grid(a, b, max_atoms, rounding, g, hi)) return convolve_parallel(a, b);
  std::vector<Real> mass(max_atoms, 0);
#pragma omp parallel
  {
    std::vector<Real> local(max_atoms, 0);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < a.size(); ++i)
      for (const auto& y : b) local[g.index(a[i].t + y.t)] += a[i].mass * y.mass;
#pragma omp critical
    for (std::size_t i = 0; i < max_atoms; ++i) mass[i] += local[i];
  }
  return collect(mass, g, hi);
}

std::vector<Atom> convolve_snapped(std::span<const Atom> a, std::span<const Atom> b, std::span<const Real> grid,
                                   Real below_value, Real t_tol) {
  // Slot 0 is below the grid, slot i+1 is grid[i].
  std::vector<Real> mass(grid.size() + 1, 0);
#pragma omp parallel
  {
    std::vector<Real> local(grid.size() + 1, 0);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < a.size(); ++i) {
      // Sums increase along b, so the grid position only moves forward.
      std::size_t g = 0;
      for (const auto& y : b) {
        Real t = a[i].t + y.t;
        Real key = t + merge_width(t, t_tol);
        while (g < grid.size() && grid[g] <= key) ++g;
        local[g] += a[i].mass * y.mass;
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] += local[i];
  }
  std::vector<Atom> out;
  if (mass[0] > 0) out.push_back({below_value, mass[0]});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (mass[i + 1] <= 0) continue;
    if (!out.empty() && out.back().t == grid[i]) out.back().mass += mass[i + 1];
    else out.push_back({grid[i], mass[i + 1]});
  }
  return out;
}

std::vector<Atom> coarsen(std::span<const Atom> atoms, std::size_t max_atoms, Rounding rounding) {
  std::vector<Atom> in(atoms.begin(), atoms.end());
  if (rounding == Rounding::none || in.size() <= max_atoms || max_atoms < 2) return in;
  Real lo = in.front().t, hi = in.back().t;
  Real step = (hi - lo) / static_cast<Real>(max_atoms - 1);
  if (!(step > 0)) return in;
  std::vector<Atom> out;
  out.reserve(max_atoms);
  for (const auto& a : in) {
    Real t;
    if (rounding == Rounding::down) {
      Real cell = std::floor((a.t - lo) / step);
      t = std::min(a.t, lo + cell * step);
    } else {
      Real cell = std::floor((hi - a.t) / step);
      t = std::max(a.t, hi - cell * step);
    }
    if (!out.empty() && std::fabs(t - out.back().t) <= merge_width(out.back().t, 1e-15L)) {
      out.back().mass += a.mass;
    } else {
      out.push_back({t, a.mass});
    }
  }
  if (rounding == Rounding::up) return sort_merge(std::move(out), 0);
  return out;
}

std::vector<Atom> snap_down(std::span<const Atom> atoms, std::span<const Real> grid, Real below_value,
                            Real t_tol) {
  std::vector<Atom> out;
  out.reserve(std::min(atoms.size(), grid.size() + 1));
  for (const auto& a : atoms) {
    // Largest grid point <= a.t + tolerance.
    Real key = a.t + merge_width(a.t, t_tol);
    auto it = std::upper_bound(grid.begin(), grid.end(), key);
    Real t = it == grid.begin() ? below_value : *(it - 1);
    if (!out.empty() && out.back().t == t) out.back().mass += a.mass;
    else out.push_back({t, a.mass});
  }
  return out;
}

}  // namespace infodiv::kernels
