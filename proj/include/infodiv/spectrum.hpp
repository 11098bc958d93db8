#pragma once

#include "infodiv/kernels.hpp"
#include "infodiv/numeric.hpp"
#include "infodiv/pmf.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace infodiv::spectrum {

using kernels::Atom;
using kernels::Rounding;

// Right-continuous step cdf with finitely many atoms on [0, inf).
class StepCdf {
 public:
  StepCdf() : atoms_{{0.0L, 1.0L}}, cum_{1.0L} {}
  // Sorts and merges (t within 1e-12). Masses must sum to 1 within mass_tol.
  explicit StepCdf(std::vector<Atom> atoms, Real mass_tol = 1e-9L);
  static StepCdf point(Real t) { return StepCdf({{t, 1.0L}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  Real min_t() const { return atoms_.front().t; }
  Real max_t() const { return atoms_.back().t; }

  Real cdf(Real t) const;       // F(t)
  Real cdf_left(Real t) const;  // F(t-)
  std::vector<Real> locations() const;

  StepCdf shifted(Real c) const;
  StepCdf scaled(Real c) const;  // law of c*T, c > 0

 private:
  std::vector<Atom> atoms_;
  std::vector<Real> cum_;
};

StepCdf spectrum_of(const prob::Pmf& p);

class GCurve {
 public:
  explicit GCurve(const StepCdf& f);
  // (gamma, G(gamma)) at 0 and at every cumulative mass.
  const std::vector<std::pair<Real, Real>>& breakpoints() const { return points_; }
  const std::vector<Real>& slopes() const { return slopes_; }
  Real operator()(Real gamma) const;
  // Smallest gamma with G(gamma) = value, for value in [0, G(1)].
  Real inverse(Real value) const;
  Real left_slope(Real gamma) const;
  Real total() const { return points_.back().second; }

 private:
  std::vector<std::pair<Real, Real>> points_;
  std::vector<Real> slopes_;  // slope on (points_[i], points_[i+1])
};

GCurve g_curve(const StepCdf& f);
Real big_g(const StepCdf& f, Real gamma);

Real inv_cdf(const StepCdf& f, Real gamma);
Real mean(const StepCdf& f);

StepCdf convolve(const StepCdf& a, const StepCdf& b);
// Convolution whose result keeps at most max_atoms atoms, moved in the given
// direction when coarsening is needed.
StepCdf convolve_bounded(const StepCdf& a, const StepCdf& b, std::size_t max_atoms, Rounding rounding);
// (1 - lambda) a + lambda b
// Conservative convolution for cdfs that are only read at grid points: sums
// are snapped down onto the sorted grid, sums below it go to 0.
StepCdf convolve_snapped(const StepCdf& a, const StepCdf& b, const std::vector<Real>& grid);

StepCdf mix(const StepCdf& a, const StepCdf& b, Real lambda);
StepCdf power_convolve(const StepCdf& f, int n);
StepCdf power_convolve_bounded(const StepCdf& f, int n, std::size_t max_atoms, Rounding rounding);
StepCdf coarsened(const StepCdf& f, std::size_t max_atoms, Rounding rounding);

struct DominanceTolerance {
  Real mass = 1e-10L;
  Real t = 1e-9L;  // atom locations closer than this (relative for t > 1) coincide
};

// F1 <= F2 in the usual stochastic order: F1(t) <= F2(t) everywhere.
bool stoch_dom(const StepCdf& f1, const StepCdf& f2, DominanceTolerance tol = {});
// Largest violation max_t (F1(t) - F2(t)), with the same t tolerance.
Real dominance_gap(const StepCdf& f1, const StepCdf& f2, DominanceTolerance tol = {});

// G_{F1} >= G_{F2} on [0,1], relative tolerance tol.
bool info_majorized(const StepCdf& f1, const StepCdf& f2, Real tol = 1e-9L);

prob::Pmf discretize(const StepCdf& f);

Real uniform_metric(const StepCdf& a, const StepCdf& b, Real t_tol = 1e-9L);

}  // namespace infodiv::spectrum
