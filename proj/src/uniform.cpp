#include "infodiv/uniform.hpp"

#include "infodiv/distributions.hpp"
#include "infodiv/divide.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace infodiv::uniform {

using spectrum::Rounding;

namespace {

constexpr std::size_t kPowerCap = 1u << 12;

// A cdf no larger than base^{*power}: exact when small, otherwise moved up.
StepCdf power_up(const StepCdf& base, int power) {
  return spectrum::power_convolve_bounded(base, power, kPowerCap, Rounding::up);
}

Real safe_ratio(Real num, Real den) { return den > 0 ? num / den : 1.0L; }

}  // namespace

Real lemma1_bound(Real gamma, int m) { return (1 + 2 * gamma / m) * (2 - 1 / gamma); }

Lemma1Step lemma1_construct(const StepCdf& base, int m, Real gamma, const InnerBuilder& inner,
                            const RunConfig& cfg, bool verify) {
  if (!(gamma > 1)) throw std::invalid_argument("lemma1: gamma must exceed 1");
  if (m < 1) throw std::invalid_argument("lemma1: m must be positive");
  Lemma1Step s;
  s.gamma = gamma;
  s.m = m;
  s.lambda = m * (1 - 1 / gamma);
  s.zeta = (gamma - 1) / (2 * gamma - 1);
  s.n_tilde = static_cast<int>(std::ceil(m / (gamma * gamma) - 1e-12L)) + 1;
  auto qr = divide::quantile_restriction(base, s.zeta);
  s.g0 = qr.g0;
  s.jumps = qr.jumps;
  s.inner = inner(qr.jumps, s.n_tilde);
  s.result = CompoundPoissonLaw(m * qr.g0, s.lambda, qr.jumps).convolve(s.inner);
  const Real ez = spectrum::mean(qr.jumps);
  s.inner_ratio = safe_ratio(s.inner.mean(), s.n_tilde * ez);
  s.ratio = safe_ratio(s.result.mean(), m * spectrum::mean(base));
  s.ratio_bound = lemma1_bound(gamma, m);
  if (s.inner_ratio <= gamma + 1e-12L && s.ratio > s.ratio_bound + 1e-6L)
    throw VerificationError("lemma1.ratio", "measured ratio exceeds (1+2g/m)(2-1/g)");
  if (verify) {
    auto check = divide::check_dominance(s.result, power_up(base, m), cfg, 1e-9L);
    s.verified = check.ok;
    s.dominance_gap = check.gap;
    if (!check.ok) throw VerificationError("lemma1.dominance", "F_V exceeds the m-fold power");
  }
  return s;
}

Real schedule_gamma(long k, Real alpha) { return std::pow((k + kE) / (k + kE - 1), alpha); }

Theorem4Schedule theorem4_schedule(long m) {
  if (m < 2) throw std::invalid_argument("theorem4_schedule: m must be at least 2");
  Theorem4Schedule s;
  s.m = m;
  const Real lnm = std::log(static_cast<Real>(m));
  const Real c = kE / (kE - 1);
  s.alpha = 1 + 1 / lnm;
  s.beta = 2 * std::pow(c, s.alpha) / (s.alpha * (s.alpha - 1)) + 1 / ((kE - 1) * (kE - 1));
  const Real ln600 = std::log(600.0L);
  s.psi = 2 * std::pow(c, 1 + 1 / ln600) + 1 / ((kE - 1) * (kE - 1) * ln600);
  Real raw = std::pow(m / (s.psi * lnm), 1 / (2 + 2 / lnm)) - kE + 1;
  s.k = std::max(0L, static_cast<long>(std::floor(raw)));
  s.gamma_k = schedule_gamma(s.k, s.alpha);
  s.m_k = static_cast<long>(std::floor(s.beta * std::pow(s.k + kE - 1, 2 * s.alpha)));
  s.guaranteed_ratio = m >= 600 ? std::min(s.gamma_k, c) : c;
  return s;
}

Real theorem4_bound(long m) {
  if (m < 2) throw std::invalid_argument("theorem4_bound: m must be at least 2");
  return 1 + 4.71L * std::sqrt(std::log2(static_cast<Real>(m)) / m);
}

namespace {

struct Built {
  CompoundPoissonLaw law;
  Real mean;
  int depth;
  Real gamma;
};

// The outer level searches a grid; inner levels follow the schedule with one
// alternative, which keeps the recursion at O(9 * 2^depth) nodes.
std::vector<Real> gamma_grid(int depth, Real alpha, bool outer) {
  std::vector<Real> g{schedule_gamma(depth - 1, alpha), 1.5L};
  if (outer) g.insert(g.end(), {1.02L, 1.05L, 1.1L, 1.2L, 1.35L, 1.75L, 2.0L});
  return g;
}

Built build(const StepCdf& base, int power, int depth, Real alpha, bool outer) {
  Built best{divide::infdiv_law(power_up(base, power)), 0, 0, 0};
  best.mean = best.law.mean();
  if (depth <= 0 || power < 2 || base.size() < 2) return best;
  InnerBuilder inner = [&](const StepCdf& b, int p) { return build(b, p, depth - 1, alpha, false).law; };
  for (Real gamma : gamma_grid(depth, alpha, outer)) {
    auto step = lemma1_construct(base, power, gamma, inner, RunConfig{}, false);
    Real mean = step.result.mean();
    if (mean < best.mean) best = {step.result, mean, depth, gamma};
  }
  return best;
}

}  // namespace

Theorem4Result theorem4_construct(const StepCdf& base, int m, int max_depth, const RunConfig& cfg) {
  if (m < 2) throw std::invalid_argument("theorem4_construct: m must be at least 2");
  const Real alpha = m >= 3 ? 1 + 1 / std::log(static_cast<Real>(m)) : 1.5L;
  const Real target_mean = m * spectrum::mean(base);
  Theorem4Result r;
  std::optional<Built> best;
  for (int d = 0; d <= std::max(0, max_depth); ++d) {
    Built b = build(base, m, d, alpha, true);
    r.ratio_by_depth.push_back(safe_ratio(b.mean, target_mean));
    if (!best || b.mean < best->mean) best = b;
  }
  r.law = best->law;
  r.depth = best->depth;
  r.gamma = best->gamma;
  r.method = best->depth == 0 ? "theorem1-infdiv" : "lemma1-depth-" + std::to_string(best->depth);
  r.achieved_ratio = safe_ratio(best->mean, target_mean);
  auto check = divide::check_dominance(r.law, power_up(base, m), cfg, 1e-9L);
  r.dominance_gap = check.gap;
  if (!check.ok || fault_injected("uniform.dominance"))
    throw VerificationError("uniform.dominance", "selected law does not dominate the m-fold power");
  const Real cap = std::max(kE / (kE - 1), theorem4_bound(m));
  if (r.achieved_ratio > cap + 1e-6L) throw VerificationError("uniform.ratio", "achieved ratio above the bound");
  return r;
}

BinPoiReport bin_poi_report(Real gamma, int n, int a) {
  if (!(gamma > 1) || n < 0 || a < 0) throw std::invalid_argument("bin_poi: invalid parameters");
  BinPoiReport r;
  r.hypothesis = a >= n / (gamma * gamma) - 1e-12L;
  const Real lambda = n * (1 - 1 / gamma);
  const Real p = gamma / (2 * gamma - 1);
  auto bin = dist::binomial(n, p);
  auto poi = dist::poisson_range(lambda, n);
  Real fm = 0, fn = 0;
  r.max_violation = -1;
  for (int k = 0; k <= n; ++k) {
    fm += bin[k];
    int j = k - a - 1;
    if (j >= 0) fn += poi[j];
    r.max_violation = std::max(r.max_violation, fn - fm);
  }
  r.dominated = r.max_violation <= 1e-12L;
  return r;
}

bool verify_bin_poi_dominance(Real gamma, int n, int a) { return bin_poi_report(gamma, n, a).dominated; }

}  // namespace infodiv::uniform
