#include "infodiv/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace infodiv::spectrum {

StepCdf::StepCdf(std::vector<Atom> atoms, Real mass_tol) {
  for (auto& a : atoms) {
    if (!std::isfinite(a.t) || !std::isfinite(a.mass) || a.mass < 0)
      throw std::invalid_argument("StepCdf: invalid atom");
    if (a.t < 0) {
      if (a.t < -1e-9L) throw std::invalid_argument("StepCdf: negative location");
      a.t = 0;
    }
  }
  atoms_ = kernels::sort_merge(std::move(atoms));
  if (atoms_.empty()) throw std::invalid_argument("StepCdf: no mass");
  cum_.resize(atoms_.size());
  Real c = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) cum_[i] = (c += atoms_[i].mass);
  if (std::fabs(c - 1) > mass_tol) throw std::invalid_argument("StepCdf: masses do not sum to 1");
}

Real StepCdf::cdf(Real t) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t, [](Real v, const Atom& a) { return v < a.t; });
  if (it == atoms_.begin()) return 0;
  return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

Real StepCdf::cdf_left(Real t) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t, [](const Atom& a, Real v) { return a.t < v; });
  if (it == atoms_.begin()) return 0;
  return cum_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

std::vector<Real> StepCdf::locations() const {
  std::vector<Real> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.t);
  return out;
}

StepCdf StepCdf::shifted(Real c) const {
  auto a = atoms_;
  for (auto& x : a) x.t += c;
  return StepCdf(std::move(a));
}

StepCdf StepCdf::scaled(Real c) const {
  if (!(c > 0)) throw std::invalid_argument("scale must be positive");
  auto a = atoms_;
  for (auto& x : a) x.t *= c;
  return StepCdf(std::move(a));
}

StepCdf spectrum_of(const prob::Pmf& p) {
  std::vector<Atom> atoms;
  atoms.reserve(p.size());
  if (p.exact()) {
    // Group equal rational weights before taking logs.
    std::map<Rational, Rational> groups;
    for (const auto& w : p.exact_weights()) {
      if (sgn(w) == 0) throw std::invalid_argument("spectrum_of: zero-weight entry");
      groups[w] += w;
    }
    for (const auto& [w, m] : groups) atoms.push_back({-log2r(to_real(w)), to_real(m)});
  } else {
    for (Real w : p.weights()) {
      if (!(w > 0)) throw std::invalid_argument("spectrum_of: zero-weight entry");
      atoms.push_back({-log2r(w), w});
    }
  }
  // Truncated pmfs are renormalized; the tail is accounted for by callers.
  Real total = 0;
  for (const auto& a : atoms) total += a.mass;
  for (auto& a : atoms) a.mass /= total;
  return StepCdf(std::move(atoms));
}

GCurve::GCurve(const StepCdf& f) {
  points_.reserve(f.size() + 1);
  points_.emplace_back(0.0L, 0.0L);
  Real gamma = 0, g = 0;
  for (const auto& a : f.atoms()) {
    Real slope = std::exp2(a.t);
    gamma += a.mass;
    g += a.mass * slope;
    slopes_.push_back(slope);
    points_.emplace_back(gamma, g);
  }
  points_.back().first = 1.0L;
}

Real GCurve::operator()(Real gamma) const {
  if (!(gamma >= 0 && gamma <= 1)) throw std::domain_error("G: gamma outside [0,1]");
  auto it = std::upper_bound(points_.begin(), points_.end(), gamma,
                             [](Real v, const auto& p) { return v < p.first; });
  if (it == points_.end()) return points_.back().second;
  std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
  return points_[i].second + (gamma - points_[i].first) * slopes_[i];
}

Real GCurve::inverse(Real value) const {
  if (value <= 0) return 0;
  if (value >= total()) return 1;
  auto it = std::lower_bound(points_.begin(), points_.end(), value,
                             [](const auto& p, Real v) { return p.second < v; });
  std::size_t i = static_cast<std::size_t>(it - points_.begin());
  if (i == 0) return 0;
  --i;
  return std::min(points_[i].first + (value - points_[i].second) / slopes_[i], points_[i + 1].first);
}

Real GCurve::left_slope(Real gamma) const {
  if (!(gamma > 0 && gamma <= 1)) throw std::domain_error("left slope needs gamma in (0,1]");
  auto it = std::lower_bound(points_.begin(), points_.end(), gamma,
                             [](const auto& p, Real v) { return p.first < v; });
  std::size_t i = static_cast<std::size_t>(it - points_.begin());
  if (i >= points_.size()) i = points_.size() - 1;
  return slopes_[i - 1];
}

GCurve g_curve(const StepCdf& f) { return GCurve(f); }
Real big_g(const StepCdf& f, Real gamma) { return GCurve(f)(gamma); }

Real inv_cdf(const StepCdf& f, Real gamma) {
  if (gamma <= 0) return f.min_t();
  if (gamma > 1) throw std::domain_error("inv_cdf: gamma above 1");
  Real c = 0;
  for (const auto& a : f.atoms()) {
    c += a.mass;
    if (c >= gamma - 1e-15L) return a.t;
  }
  return f.max_t();
}

Real mean(const StepCdf& f) {
  Real m = 0;
  for (const auto& a : f.atoms()) m += a.t * a.mass;
  return m;
}

StepCdf convolve(const StepCdf& a, const StepCdf& b) {
  return StepCdf(kernels::convolve_parallel(a.atoms(), b.atoms()));
}

StepCdf coarsened(const StepCdf& f, std::size_t max_atoms, Rounding rounding) {
  if (f.size() <= max_atoms || rounding == Rounding::none) return f;
  return StepCdf(kernels::coarsen(f.atoms(), max_atoms, rounding));
}

StepCdf convolve_bounded(const StepCdf& a, const StepCdf& b, std::size_t max_atoms, Rounding rounding) {
  // Beyond this many pairs an exact sort costs more than binning.
  constexpr std::size_t kExactPairs = 1u << 21;
  if (rounding != Rounding::none && a.size() * b.size() > std::max(kExactPairs, max_atoms))
    return StepCdf(kernels::convolve_binned_parallel(a.atoms(), b.atoms(), max_atoms, rounding));
  auto c = kernels::convolve_parallel(a.atoms(), b.atoms());
  if (rounding != Rounding::none && c.size() > max_atoms) c = kernels::coarsen(c, max_atoms, rounding);
  return StepCdf(std::move(c));
}

StepCdf convolve_snapped(const StepCdf& a, const StepCdf& b, const std::vector<Real>& grid) {
  return StepCdf(kernels::convolve_snapped(a.atoms(), b.atoms(), grid, 0, 1e-12L));
}

StepCdf mix(const StepCdf& a, const StepCdf& b, Real lambda) {
  if (!(lambda >= 0 && lambda <= 1)) throw std::domain_error("mix: lambda outside [0,1]");
  std::vector<Atom> atoms;
  for (const auto& x : a.atoms()) atoms.push_back({x.t, (1 - lambda) * x.mass});
  for (const auto& x : b.atoms()) atoms.push_back({x.t, lambda * x.mass});
  return StepCdf(std::move(atoms));
}

StepCdf power_convolve_bounded(const StepCdf& f, int n, std::size_t max_atoms, Rounding rounding) {
  if (n < 1) throw std::invalid_argument("power_convolve: n must be positive");
  StepCdf result = StepCdf::point(0);
  StepCdf base = f;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      result = first ? base : convolve_bounded(result, base, max_atoms, rounding);
      first = false;
    }
    n >>= 1;
    if (n > 0) base = convolve_bounded(base, base, max_atoms, rounding);
  }
  return result;
}

StepCdf power_convolve(const StepCdf& f, int n) {
  return power_convolve_bounded(f, n, 0, Rounding::none);
}

namespace {

std::vector<Real> union_locations(const StepCdf& a, const StepCdf& b) {
  std::vector<Real> s = a.locations();
  auto lb = b.locations();
  s.insert(s.end(), lb.begin(), lb.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

Real dominance_gap(const StepCdf& f1, const StepCdf& f2, DominanceTolerance tol) {
  Real gap = -1;
  for (Real s : union_locations(f1, f2)) {
    Real w = kernels::merge_width(s, tol.t);
    gap = std::max(gap, f1.cdf(s) - f2.cdf(s + w));
  }
  return gap;
}

bool stoch_dom(const StepCdf& f1, const StepCdf& f2, DominanceTolerance tol) {
  return dominance_gap(f1, f2, tol) <= tol.mass;
}

bool info_majorized(const StepCdf& f1, const StepCdf& f2, Real tol) {
  GCurve g1(f1), g2(f2);
  std::vector<Real> gammas;
  for (const auto& p : g1.breakpoints()) gammas.push_back(p.first);
  for (const auto& p : g2.breakpoints()) gammas.push_back(p.first);
  for (Real g : gammas) {
    g = std::clamp(g, 0.0L, 1.0L);
    Real v2 = g2(g);
    if (g1(g) < v2 - tol * std::max(1.0L, v2)) return false;
  }
  return true;
}

prob::Pmf discretize(const StepCdf& f) {
  GCurve g(f);
  const Real total = g.total();
  if (!std::isfinite(total) || total > 1e8L) throw std::invalid_argument("discretize: G(1) too large");
  std::vector<Real> q;
  Real prev = 0;
  for (long k = 1;; ++k) {
    Real kk = static_cast<Real>(k);
    bool last = kk >= total || (total - kk) <= 1e-12L * total;
    Real gamma = last ? 1.0L : g.inverse(kk);
    if (!last && 1 - gamma < 1e-12L) {
      gamma = 1;
      last = true;
    }
    q.push_back(gamma - prev);
    prev = gamma;
    if (last) break;
  }
  Real sum = 0;
  for (Real x : q) sum += x;
  q.back() += 1 - sum;
  return prob::Pmf::from_floats(std::move(q));
}

Real uniform_metric(const StepCdf& a, const StepCdf& b, Real t_tol) {
  Real d = 0;
  for (Real s : union_locations(a, b)) {
    Real w = kernels::merge_width(s, t_tol);
    d = std::max(d, std::fabs(a.cdf(s + w) - b.cdf(s + w)));
  }
  return d;
}

}  // namespace infodiv::spectrum
