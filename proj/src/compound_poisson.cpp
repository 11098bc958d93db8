#include "infodiv/compound_poisson.hpp"

#include "infodiv/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace infodiv::divide {

using spectrum::Atom;
using spectrum::Rounding;

CompoundPoissonLaw::CompoundPoissonLaw(Real offset, Real rate, StepCdf jumps) : offset_(offset) {
  if (!(offset >= 0) || !(rate >= 0)) throw std::invalid_argument("compound Poisson: negative parameter");
  if (rate > 0) components_.push_back({rate, std::move(jumps)});
}

Real CompoundPoissonLaw::rate() const {
  Real r = 0;
  for (const auto& c : components_) r += c.rate;
  return r;
}

StepCdf CompoundPoissonLaw::jump_law() const {
  Real total = rate();
  if (total == 0) return StepCdf::point(0);
  std::vector<Atom> atoms;
  for (const auto& c : components_)
    for (const auto& a : c.jumps.atoms()) atoms.push_back({a.t, a.mass * c.rate / total});
  return StepCdf(std::move(atoms));
}

Real CompoundPoissonLaw::mean() const {
  Real m = offset_;
  for (const auto& c : components_) m += c.rate * spectrum::mean(c.jumps);
  return m;
}

CompoundPoissonLaw CompoundPoissonLaw::convolve(const CompoundPoissonLaw& other) const {
  CompoundPoissonLaw out = *this;
  out.offset_ += other.offset_;
  out.components_.insert(out.components_.end(), other.components_.begin(), other.components_.end());
  return out;
}

CompoundPoissonLaw CompoundPoissonLaw::shifted(Real c) const {
  CompoundPoissonLaw out = *this;
  out.offset_ += c;
  if (out.offset_ < 0) throw std::invalid_argument("compound Poisson: negative offset");
  return out;
}

CompoundPoissonLaw CompoundPoissonLaw::root(int n) const {
  if (n < 1) throw std::invalid_argument("root: n must be positive");
  CompoundPoissonLaw out = *this;
  out.offset_ /= n;
  for (auto& c : out.components_) c.rate /= n;
  return out;
}

namespace {

bool snapping(const MaterializeOptions& opts) {
  return opts.rounding == Rounding::down && !opts.snap_grid.empty();
}

MaterializedLaw materialize_component(const PoissonComponent& c, Real eps, const MaterializeOptions& opts) {
  auto pois = dist::poisson(c.rate, eps);
  std::vector<Atom> acc;
  StepCdf power = StepCdf::point(0);
  bool coarse = false;
  for (std::size_t k = 0; k < pois.pmf.size(); ++k) {
    if (k > 0) {
      if (snapping(opts)) {
        power = spectrum::convolve_snapped(power, c.jumps, opts.snap_grid);
        coarse = true;
      } else {
        power = spectrum::convolve_bounded(power, c.jumps, opts.max_atoms, opts.rounding);
        coarse = coarse || power.size() >= opts.max_atoms;
      }
    }
    for (const auto& a : power.atoms()) acc.push_back({a.t, a.mass * pois.pmf[k]});
  }
  // Truncated mass goes to the smallest location (down) or the largest
  // reached one (up).
  Real where = 0;
  if (opts.rounding == Rounding::up) where = power.max_t();
  acc.push_back({where, pois.tail});
  auto merged = kernels::sort_merge(std::move(acc));
  if (opts.rounding != Rounding::none && merged.size() > opts.max_atoms) {
    merged = kernels::coarsen(merged, opts.max_atoms, opts.rounding);
    coarse = true;
  }
  Real total = 0;
  for (const auto& a : merged) total += a.mass;
  for (auto& a : merged) a.mass /= total;
  return {StepCdf(std::move(merged)), pois.tail, coarse};
}

}  // namespace

MaterializedLaw CompoundPoissonLaw::materialize(const MaterializeOptions& opts) const {
  MaterializedLaw out{StepCdf::point(0), 0, false};
  if (components_.empty()) {
    out.cdf = StepCdf::point(offset_);
    return out;
  }
  const Real eps = opts.poisson_eps / static_cast<Real>(components_.size());
  bool first = true;
  for (const auto& c : components_) {
    auto part = materialize_component(c, eps, opts);
    out.poisson_tail += part.poisson_tail;
    out.coarsened = out.coarsened || part.coarsened;
    if (first) {
      out.cdf = std::move(part.cdf);
      first = false;
    } else {
      if (snapping(opts)) {
        out.cdf = spectrum::convolve_snapped(out.cdf, part.cdf, opts.snap_grid);
      } else {
        out.cdf = spectrum::convolve_bounded(out.cdf, part.cdf, opts.max_atoms, opts.rounding);
        out.coarsened = out.coarsened || out.cdf.size() >= opts.max_atoms;
      }
    }
  }
  out.cdf = out.cdf.shifted(offset_);
  return out;
}

}  // namespace infodiv::divide
