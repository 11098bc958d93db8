#include "infodiv/divide.hpp"

#include "infodiv/distributions.hpp"
#include "infodiv/uniform.hpp"

#include <cmath>
#include <sstream>

namespace infodiv::divide {

using spectrum::Atom;
using spectrum::Rounding;

QuantileRestriction quantile_restriction(const StepCdf& f, Real zeta) {
  if (!(zeta >= 0 && zeta < 1)) throw std::domain_error("quantile_restriction: zeta outside [0,1)");
  Real g0 = spectrum::inv_cdf(f, zeta);
  std::vector<Atom> z;
  Real prev = 0, cum = 0;
  for (const auto& a : f.atoms()) {
    cum += a.mass;
    if (a.t >= g0 && cum > zeta) {
      Real m = (cum - std::max(prev, zeta)) / (1 - zeta);
      if (m > 0) z.push_back({a.t - g0, m});
    }
    prev = cum;
  }
  Real total = 0;
  for (const auto& a : z) total += a.mass;
  for (auto& a : z) a.mass /= total;
  return {g0, StepCdf(std::move(z))};
}

Real theorem1_factor(int n) {
  if (n <= 0) return kE / (kE - 1);
  if (n == 1) return 1;
  return 1 / (1 - std::pow(1 - 1.0L / n, static_cast<Real>(n)));
}

CompoundPoissonLaw infdiv_law(const StepCdf& f) {
  auto qr = quantile_restriction(f, std::exp(-1.0L));
  return CompoundPoissonLaw(qr.g0, 1.0L, qr.jumps);
}

DominanceCheck check_dominance(const CompoundPoissonLaw& law, const StepCdf& target, const RunConfig& cfg,
                               Real mass_tol) {
  MaterializeOptions opts;
  opts.poisson_eps = cfg.poisson_trunc_eps;
  opts.max_atoms = cfg.max_atoms;
  DominanceCheck out{false, 0, 0, false, StepCdf::point(0)};
  // First pass snaps onto the target's own locations, then uniform grids.
  for (Real t : target.locations())
    if (t >= law.offset()) opts.snap_grid.push_back(t - law.offset());
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) opts.snap_grid.clear();
    auto mat = law.materialize(opts);
    Real gap = spectrum::dominance_gap(mat.cdf, target);
    out = {gap <= mass_tol, gap, mat.poisson_tail, mat.coarsened, std::move(mat.cdf)};
    if (out.ok || !out.coarsened) break;
    if (attempt > 0) opts.max_atoms *= 8;
  }
  if (fault_injected("theorem1.dominance")) out.ok = false;
  return out;
}

namespace {

void check_ratio(Real ratio, Real factor, Real slack) {
  if (ratio < 1 - slack || ratio > factor + slack) {
    std::ostringstream os;
    os << "mean ratio " << static_cast<double>(ratio) << " outside [1, " << static_cast<double>(factor) << "]";
    throw VerificationError("theorem1.mean_ratio", os.str());
  }
}

Real ratio_of(Real dominating_mean, Real base_mean) {
  if (base_mean <= 0) return 1;
  return dominating_mean / base_mean;
}

}  // namespace

Theorem1Result dominate_ndiv(const StepCdf& f, int n, const RunConfig& cfg) {
  if (n < 1) throw std::invalid_argument("dominate_ndiv: n must be positive");
  Theorem1Result r;
  r.n = n;
  r.zeta = n == 1 ? 0.0L : std::pow(1 - 1.0L / n, static_cast<Real>(n));
  auto qr = quantile_restriction(f, r.zeta);
  r.offset_g0 = qr.g0;
  r.jump_pmf = qr.jumps;
  // N ~ Bin(n, 1/n) has mean 1.
  r.dominating_mean = qr.g0 + spectrum::mean(qr.jumps);
  r.mean_ratio = ratio_of(r.dominating_mean, spectrum::mean(f));

  std::vector<Atom> root{{qr.g0 / n, 1 - 1.0L / n}};
  for (const auto& a : qr.jumps.atoms()) root.push_back({qr.g0 / n + a.t, a.mass / n});
  r.root_cdf = StepCdf(std::move(root));

  auto binom = dist::binomial(n, 1.0L / n);
  std::size_t cap = cfg.max_atoms;
  std::vector<Real> grid;
  for (Real t : f.locations())
    if (t >= qr.g0) grid.push_back(t - qr.g0);
  // Exact first; a coarsened F_V that misses falls back to target snapping, then a finer grid.
  for (int attempt = 0; attempt < 3; ++attempt) {
    const bool snap = attempt == 1;
    std::vector<Atom> acc;
    StepCdf power = StepCdf::point(0);
    Real used = 0;
    bool coarse = false;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) {
        if (snap) {
          power = spectrum::convolve_snapped(power, qr.jumps, grid);
          coarse = true;
        } else {
          power = spectrum::convolve_bounded(power, qr.jumps, cap, Rounding::down);
          coarse = coarse || power.size() >= cap;
        }
      }
      for (const auto& a : power.atoms()) acc.push_back({a.t, a.mass * binom[k]});
      used += binom[k];
      // Remaining binomial mass goes to the offset, which only raises F_V.
      if (1 - used <= cfg.poisson_trunc_eps) break;
    }
    acc.push_back({0, std::max(0.0L, 1 - used)});
    r.poisson_tail = std::max(0.0L, 1 - used);
    auto merged = kernels::sort_merge(std::move(acc));
    if (merged.size() > cap) {
      merged = kernels::coarsen(merged, cap, Rounding::down);
      coarse = true;
    }
    Real total = 0;
    for (const auto& a : merged) total += a.mass;
    for (auto& a : merged) a.mass /= total;
    r.dominating_cdf = StepCdf(std::move(merged)).shifted(qr.g0);
    r.coarsened = coarse;
    r.dominance_gap = spectrum::dominance_gap(r.dominating_cdf, f);
    if (r.dominance_gap <= 1e-10L || !coarse) break;
    if (attempt == 1) cap *= 8;
  }
  if (r.dominance_gap > 1e-10L || fault_injected("theorem1.dominance"))
    throw VerificationError("theorem1.dominance",
                            "F_V exceeds F by " + std::to_string(static_cast<double>(r.dominance_gap)));
  check_ratio(r.mean_ratio, theorem1_factor(n), 1e-9L);
  return r;
}

Theorem1Result dominate_infdiv(const StepCdf& f, const RunConfig& cfg) {
  Theorem1Result r;
  r.zeta = std::exp(-1.0L);
  auto law = infdiv_law(f);
  auto qr = quantile_restriction(f, r.zeta);
  r.offset_g0 = qr.g0;
  r.jump_pmf = qr.jumps;
  r.dominating_mean = law.mean();
  r.mean_ratio = ratio_of(r.dominating_mean, spectrum::mean(f));
  auto check = check_dominance(law, f, cfg, 1e-9L);
  r.dominating_cdf = check.materialized;
  r.poisson_tail = check.poisson_tail;
  r.dominance_gap = check.gap;
  r.coarsened = check.coarsened;
  r.root_cdf = std::move(law);
  if (!check.ok)
    throw VerificationError("theorem1.dominance",
                            "F_V exceeds F by " + std::to_string(static_cast<double>(check.gap)));
  check_ratio(r.mean_ratio, theorem1_factor(0), 1e-9L);
  return r;
}

// ---- booster -------------------------------------------------------------

prob::LazyPmf booster_pmf(int n) {
  if (n < 1) throw std::invalid_argument("booster_pmf: n must be positive");
  const Real inv = 1.0L / n;
  auto cdf = [inv](std::uint64_t k) -> Real {
    if (k == 0) return 0;
    return std::exp(std::log1p(-std::ldexp(1.0L, -static_cast<int>(k))) * inv);
  };
  auto weight = [inv, cdf](std::uint64_t k) -> Real {
    if (k == 0) return 0;
    if (k == 1) return cdf(1);
    // a_k - a_{k-1} = a_{k-1} (((1-2^{-k}) / (1-2^{-(k-1)}))^{1/n} - 1)
    Real h = std::ldexp(1.0L, -static_cast<int>(k));
    Real ratio_log = std::log1p(h / (1 - 2 * h));
    return cdf(k - 1) * std::expm1(ratio_log * inv);
  };
  auto tail = [inv](std::uint64_t K) -> Real {
    return -std::expm1(std::log1p(-std::ldexp(1.0L, -static_cast<int>(K))) * inv);
  };
  // For k >= 2: 2^{-k}/n <= p_B(k) <= 2^{1-k}/n, so each term of the tail
  // entropy is at most 2^{1-k}/n (k + log2 n).
  auto tail_entropy = [n](std::uint64_t K) -> Real {
    Real k = static_cast<Real>(std::max<std::uint64_t>(K, 2));
    return (2.0L / n) * std::ldexp(1.0L, -static_cast<int>(k)) * (k + 2 + std::log2(static_cast<Real>(n)));
  };
  std::function<std::optional<Rational>(std::uint64_t)> exact;
  if (n == 1) exact = [](std::uint64_t k) -> std::optional<Rational> { return *prob::geometric_half().exact_weight(k); };
  return prob::LazyPmf("B(n=" + std::to_string(n) + ")", weight, tail, tail_entropy, exact);
}

BoosterWitness booster_witness(int n, int depth) {
  auto b = booster_pmf(n);
  BoosterWitness w{n, depth, 0, false};
  Real sum = 0, comp = 0;
  for (int k = 1; k <= depth; ++k) {
    // Kahan summation of the pmf, then the cdf of the maximum of n copies.
    Real y = b.weight(k) - comp;
    Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    Real max_cdf = std::pow(sum, static_cast<Real>(n));
    Real target = 1 - std::ldexp(1.0L, -k);
    w.max_cdf_error = std::max(w.max_cdf_error, std::fabs(max_cdf - target));
  }
  w.ok = w.max_cdf_error <= 1e-14L && !fault_injected("divide.booster_witness");
  return w;
}

Real booster_entropy_bound(int n) {
  Real s = std::exp2(-1.0L / n);
  return binary_entropy(s) + 2 * (1 - s);
}

// ---- bounds ---------------------------------------------------------------

Real additive_term(Real H, int n) {
  const Real c = kE / ((kE - 1) * kLog2E);
  Real x = std::min(std::sqrt(c * H / n), 0.5L);
  return binary_entropy(x) + booster_entropy_bound(n);
}

Real bound_with_ratio(Real H, int n, Real ratio) {
  if (n < 1) throw std::invalid_argument("bound: n must be positive");
  return H * ratio / n + std::min(2.43L, additive_term(H, n));
}

Real bound_theorem2(Real H, int n) { return bound_with_ratio(H, n, theorem1_factor(n)); }

// ---- pipelines --------------------------------------------------------------

std::optional<prob::Pmf> rationalize_root(const prob::Pmf& p, int n, const prob::Pmf& target) {
  const int S = 48;
  mpz_class scale(1);
  scale <<= S;
  const Rational unit(mpz_class(1), scale);
  prob::Pmf q = p.without_zeros().sorted();
  const std::size_t l = target.without_zeros().size();
  for (long shrink = 1; shrink <= 1024; shrink *= 2) {
    std::vector<Rational> kept;
    Rational total(0);
    for (Real w : q.weights()) {
      Rational x = from_real(w) * scale;
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
      fl -= shrink;
      if (fl <= 0) continue;
      kept.emplace_back(fl, scale);
      kept.back().canonicalize();
      total += kept.back();
    }
    if (kept.empty()) return std::nullopt;
    Rational deficit = Rational(1) - total;
    // New atoms must stay below the l-th largest retained product so that
    // they do not enter the compared prefix.
    Rational nu = kept.back();
    long double count_cap = std::pow(static_cast<long double>(kept.size()), n);
    if (count_cap >= static_cast<long double>(l)) {
      auto top = prob::tensor_power_topk<Rational>(std::span<const Rational>(kept), n, l);
      Rational lead(1);
      for (int i = 1; i < n; ++i) lead *= kept.front();
      Rational limit = top.back() / lead;
      if (limit < nu) nu = limit;
    }
    {
      Rational x = nu * scale;
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
      nu = fl > 0 ? Rational(fl, scale) : unit;
      nu.canonicalize();
    }
    std::vector<Rational> w = kept;
    Rational left = deficit;
    std::size_t added = 0;
    while (sgn(left) > 0 && added < 4096) {
      Rational piece = left < nu ? left : nu;
      w.push_back(piece);
      left -= piece;
      ++added;
    }
    if (sgn(left) > 0) continue;
    auto cand = prob::Pmf::from_rationals(std::move(w));
    if (prob::power_majorizes(cand, n, target)) return cand;
  }
  return std::nullopt;
}

namespace {

// p^{xn} with flat tuple labels "(a,b,c)".
prob::Pmf flat_power(const prob::Pmf& p, int n) {
  std::vector<std::string> labels{""};
  std::vector<Rational> ew{Rational(1)};
  std::vector<Real> fw{1.0L};
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> nl;
    std::vector<Rational> ne;
    std::vector<Real> nf;
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) {
        nl.push_back(labels[a] + (i ? "," : "") + p.labels()[b]);
        if (p.exact()) ne.push_back(ew[a] * p.exact_weights()[b]);
        nf.push_back(fw[a] * p.weights()[b]);
      }
    labels = std::move(nl);
    ew = std::move(ne);
    fw = std::move(nf);
  }
  for (auto& l : labels) l = "(" + l + ")";
  if (p.exact()) return prob::Pmf::from_rationals(std::move(labels), std::move(ew));
  return prob::Pmf::from_floats(std::move(labels), std::move(fw), 0, 1e-9L);
}

void finish_entropies(DivisionCertificate& c, const RunConfig& cfg) {
  c.H_Y = prob::entropy(c.p_Y);
  c.H_B = c.p_B.entropy(cfg.tail_eps);
  c.H_Z1 = c.H_Y + c.H_B.lower;
  c.tail_slack = c.H_B.upper - c.H_B.lower;
  c.p_Z = prob::product(c.p_Y, c.p_B, cfg.tail_eps);
  c.witness = booster_witness(c.n);
  c.verdicts.booster_witness = c.witness.ok;
  if (!c.witness.ok)
    throw VerificationError("divide.booster_witness", "max of n booster copies is not Geom(1/2)");
  c.lower_bound = c.H_X / c.n;
  c.additive = std::min(2.43L, additive_term(c.H_X, c.n));
  c.upper_bound = c.H_X * c.multiplicative_factor / c.n + c.additive;
  const Real slack = 1e-6L;
  c.verdicts.entropy_sandwich = c.lower_bound <= c.H_Z1 + c.tail_slack + slack &&
                                c.H_Z1 + c.tail_slack <= c.upper_bound + slack &&
                                !fault_injected("divide.entropy_sandwich");
  if (!c.verdicts.entropy_sandwich) {
    std::ostringstream os;
    os << "H(Z1)=" << static_cast<double>(c.H_Z1) << " outside [" << static_cast<double>(c.lower_bound) << ", "
       << static_cast<double>(c.upper_bound) << "]";
    throw VerificationError("divide.entropy_sandwich", os.str());
  }
}

constexpr std::size_t kMaxMapSources = 20000;

}  // namespace

DivisionCertificate divide_pmf(const prob::Pmf& p_X, int n, const RunConfig& cfg) {
  if (n < 1) throw std::invalid_argument("divide_pmf: n must be positive");
  DivisionCertificate c;
  c.n = n;
  c.p_X = p_X.without_zeros().sorted();
  c.H_X = prob::entropy(c.p_X);
  c.p_B = booster_pmf(n);
  c.multiplicative_factor = theorem1_factor(n);

  if (n == 1) {
    c.p_Y = c.p_X;
    c.H_Y = c.H_X;
    c.H_B = c.p_B.entropy(cfg.tail_eps);
    c.p_Z = c.p_X;
    c.H_Z1 = c.H_X;
    c.lower_bound = c.H_X;
    c.additive = std::min(2.43L, additive_term(c.H_X, 1));
    c.upper_bound = bound_theorem2(c.H_X, 1);
    c.dominator = "identity";
    c.map_description = "Z1 = X; identity map";
    c.witness = booster_witness(1);
    c.verdicts = {true, true, true, true, true, c.witness.ok, true, true};
    return c;
  }

  auto F = spectrum::spectrum_of(c.p_X);
  auto t1 = dominate_ndiv(F, n, cfg);
  c.verdicts.dominance = true;
  c.mean_ratio = t1.mean_ratio;
  c.dominator = "theorem1";
  auto p_Y = spectrum::discretize(std::get<StepCdf>(t1.root_cdf)).sorted();

  if (c.p_X.exact()) {
    auto r = rationalize_root(p_Y, n, c.p_X);
    if (!r) throw VerificationError("divide.majorization", "no dyadic root passes the exact majorization check");
    c.p_Y = std::move(*r);
  } else {
    c.p_Y = p_Y;
  }
  c.verdicts.majorization = prob::power_majorizes(c.p_Y, n, c.p_X) && !fault_injected("divide.majorization");
  if (!c.verdicts.majorization)
    throw VerificationError("divide.majorization", "p_Y^{xn} is not majorized by p_X");

  if (std::pow(static_cast<long double>(c.p_Y.size()), n) <= 2e5L) {
    auto lhs = spectrum::power_convolve(spectrum::spectrum_of(c.p_Y), n);
    c.verdicts.info_majorization_checked = true;
    c.verdicts.info_majorization = spectrum::info_majorized(lhs, F, 1e-9L);
    if (!c.verdicts.info_majorization)
      throw VerificationError("divide.info_majorization", "spectrum of p_Y^{xn} is not informationally majorized");
  }

  finish_entropies(c, cfg);

  const bool exact = c.p_Y.exact() && c.p_X.exact();
  const long double sources = std::pow(static_cast<long double>(c.p_Y.size()), n);
  if ((exact || cfg.emit_map) && sources <= kMaxMapSources) {
    auto src = flat_power(c.p_Y, n);
    auto map = geom_aggregation_map(src, c.p_X);
    auto check = verify_geom_map(src, c.p_X, map, cfg.tolerance);
    c.verdicts.aggregation_checked = true;
    c.verdicts.aggregation = check.ok && !fault_injected("divide.aggregation");
    if (!c.verdicts.aggregation) throw VerificationError("divide.aggregation", check.detail);
    c.aggregation_map = std::move(map);
  }
  std::ostringstream os;
  os << "X = g(Y_1..Y_" << n << ", max(B_1..B_" << n << ")) with Z_i = (Y_i, B_i); "
     << "max of the boosters is Geom(1/2); g is the geometric aggregation map of p_Y^{x" << n
     << "} x Geom(1/2) onto p_X";
  if (!c.aggregation_map) os << " (not materialized)";
  c.map_description = os.str();
  return c;
}

DivisionCertificate divide_iid(const prob::Pmf& p_Y_base, int m, int n, const RunConfig& cfg) {
  if (m < 2) throw std::invalid_argument("divide_iid: m must be at least 2");
  if (n < 1) throw std::invalid_argument("divide_iid: n must be positive");
  DivisionCertificate c;
  c.n = n;
  prob::Pmf base = p_Y_base.without_zeros().sorted();
  c.p_X = base;
  c.H_X = m * prob::entropy(base);
  c.p_B = booster_pmf(n);

  auto F_base = spectrum::spectrum_of(base);
  // Moved up: anything dominating it or majorizing its G-curve does the same
  // for the exact power.
  auto F_X = spectrum::power_convolve_bounded(F_base, m, cfg.max_atoms, Rounding::up);
  const Real true_mean = m * spectrum::mean(F_base);
  auto best = uniform::theorem4_construct(F_base, m, cfg.max_depth, cfg);
  StepCdf root;
  c.mean_ratio = best.achieved_ratio;
  c.dominator = best.method;
  bool use_ndiv = false;
  Theorem1Result t1;
  if (n > 1) {
    t1 = dominate_ndiv(F_X, n, cfg);
    t1.mean_ratio = true_mean > 0 ? t1.dominating_mean / true_mean : 1;
    use_ndiv = t1.mean_ratio < best.achieved_ratio;
  }
  if (use_ndiv) {
    c.mean_ratio = t1.mean_ratio;
    c.dominator = "theorem1-ndiv";
    root = std::get<StepCdf>(t1.root_cdf);
  } else {
    MaterializeOptions opts;
    opts.poisson_eps = cfg.poisson_trunc_eps;
    opts.max_atoms = cfg.max_atoms;
    opts.rounding = Rounding::up;
    root = best.law.root(n).materialize(opts).cdf;
  }
  c.verdicts.dominance = true;
  c.multiplicative_factor = c.mean_ratio;
  c.p_Y = spectrum::discretize(root).sorted();

  // Only spectra are available for X, so majorization is checked through
  // the G-curve criterion with the left side moved down.
  auto lhs = spectrum::power_convolve_bounded(spectrum::spectrum_of(c.p_Y), n, cfg.max_atoms * 4, Rounding::down);
  c.verdicts.info_majorization_checked = true;
  c.verdicts.info_majorization = spectrum::info_majorized(lhs, F_X, 1e-9L) && !fault_injected("divide.majorization");
  c.verdicts.majorization = c.verdicts.info_majorization;
  if (!c.verdicts.info_majorization)
    throw VerificationError("divide.majorization", "spectrum of p_Y^{xn} is not informationally majorized by X");

  finish_entropies(c, cfg);
  std::ostringstream os;
  os << "X = Y^" << m << " split into " << n << " pieces through a " << c.dominator
     << " dominating law; aggregation map not materialized";
  c.map_description = os.str();
  return c;
}

}  // namespace infodiv::divide
