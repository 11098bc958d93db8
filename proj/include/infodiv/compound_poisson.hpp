#pragma once

#include "infodiv/spectrum.hpp"

#include <vector>

namespace infodiv::divide {

using spectrum::StepCdf;

struct PoissonComponent {
  Real rate;
  StepCdf jumps;  // may carry an atom at 0
};

struct MaterializeOptions {
  Real poisson_eps = 1e-12L;
  std::size_t max_atoms = 4096;
  // down: every moved atom goes left and the Poisson tail sits at the
  // offset, so the result is a pointwise upper bound on the true cdf.
  spectrum::Rounding rounding = spectrum::Rounding::down;
  // With down rounding: sorted nonnegative locations, relative to the offset,
  // at which the cdf will be evaluated. Jump sums are snapped down onto them,
  // which leaves the cdf there a valid upper bound at far fewer atoms.
  std::vector<Real> snap_grid;
};

struct MaterializedLaw {
  StepCdf cdf;
  Real poisson_tail = 0;  // total truncated Poisson mass folded into cdf
  bool coarsened = false;
};

// offset + sum over components of a compound Poisson sum. The components are
// kept separate so that materialization can convolve them one at a time.
class CompoundPoissonLaw {
 public:
  CompoundPoissonLaw() = default;
  CompoundPoissonLaw(Real offset, Real rate, StepCdf jumps);

  Real offset() const { return offset_; }
  Real rate() const;
  // Rate-weighted mixture of component jump laws (atom at 0 if rate is 0).
  StepCdf jump_law() const;
  const std::vector<PoissonComponent>& components() const { return components_; }
  Real mean() const;

  CompoundPoissonLaw convolve(const CompoundPoissonLaw& other) const;
  CompoundPoissonLaw shifted(Real c) const;
  // The law whose n-fold convolution is this one.
  CompoundPoissonLaw root(int n) const;

  MaterializedLaw materialize(const MaterializeOptions& opts = {}) const;

 private:
  Real offset_ = 0;
  std::vector<PoissonComponent> components_;
};

}  // namespace infodiv::divide
