#pragma once

#include "infodiv/numeric.hpp"

#include <span>
#include <vector>

namespace infodiv::kernels {

struct Atom {
  Real t;
  Real mass;
};

enum class Rounding { none, down, up };

inline Real merge_width(Real t, Real tol) { return tol * (t > 1 ? t : 1.0L); }

// Sorts by t and merges atoms whose t lies within tol (relative for |t|>1)
// of the first atom of the current cluster.
std::vector<Atom> sort_merge(std::vector<Atom> atoms, Real tol = 1e-12L);

// All pairwise sums. The serial version is the reference the parallel one is
// tested against.
std::vector<Atom> convolve_serial(std::span<const Atom> a, std::span<const Atom> b, Real tol = 1e-12L);
std::vector<Atom> convolve_parallel(std::span<const Atom> a, std::span<const Atom> b, Real tol = 1e-12L);

// Convolution straight onto a uniform grid of max_atoms points spanning the
// range of sums; every pair sum is rounded up or down to a grid point.
std::vector<Atom> convolve_binned_serial(std::span<const Atom> a, std::span<const Atom> b, std::size_t max_atoms,
                                         Rounding rounding);
std::vector<Atom> convolve_binned_parallel(std::span<const Atom> a, std::span<const Atom> b, std::size_t max_atoms,
                                           Rounding rounding);

// Pairwise sums snapped down onto a sorted grid (below_value under its first
// point). Equals snap_down(convolve_serial(a, b), ...) without building the
// full product.
std::vector<Atom> convolve_snapped(std::span<const Atom> a, std::span<const Atom> b, std::span<const Real> grid,
                                   Real below_value, Real t_tol);

// Moves atoms onto a uniform grid with at most max_atoms points. down keeps
// the minimum fixed and never increases a location, up keeps the maximum
// fixed and never decreases one.
std::vector<Atom> coarsen(std::span<const Atom> atoms, std::size_t max_atoms, Rounding rounding);

// Snaps every atom down to the largest grid point not above it. Atoms below
// the first grid point go to below_value.
std::vector<Atom> snap_down(std::span<const Atom> atoms, std::span<const Real> grid, Real below_value,
                            Real t_tol);

}  // namespace infodiv::kernels
