#include "infodiv/sid.hpp"

#include "infodiv/divide.hpp"
#include "infodiv/uniform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace infodiv::sid {

namespace {

mpz_class binom(std::uint64_t n, std::uint64_t k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return c;
}

std::uint64_t to_u64(const mpz_class& z) {
  if (z > mpz_class(std::numeric_limits<unsigned long>::max())) throw std::overflow_error("SNB block too large");
  return z.get_ui();
}

Rational rpow(const Rational& x, std::uint64_t e) {
  Rational out(1);
  for (std::uint64_t i = 0; i < e; ++i) out *= x;
  return out;
}

}  // namespace

void SnbParams::validate() const {
  if (r < 1) throw std::invalid_argument("SNB: r must be a positive integer");
  if (sgn(p) <= 0 || p > 1) throw std::invalid_argument("SNB: p must lie in (0,1]");
  if (a < 1 || b < 1) throw std::invalid_argument("SNB: a and b must be positive integers");
}

std::uint64_t SnbParams::block_size(std::uint64_t k) const {
  mpz_class bk;
  mpz_ui_pow_ui(bk.get_mpz_t(), b, k);
  return to_u64(binom(k + r - 1, r - 1) * a * bk);
}

Rational SnbParams::atom_weight(std::uint64_t k) const {
  Rational w = rpow(p, r) / Rational(mpz_class(a)) * rpow((Rational(1) - p) / Rational(mpz_class(b)), k);
  w.canonicalize();
  return w;
}

Rational SnbParams::block_mass(std::uint64_t k) const {
  Rational w = Rational(binom(k + r - 1, k)) * rpow(p, r) * rpow(Rational(1) - p, k);
  w.canonicalize();
  return w;
}

std::uint64_t snb_last_block(const SnbParams& params, Real tail_eps) {
  params.validate();
  Rational cum(0);
  for (std::uint64_t k = 0;; ++k) {
    cum += params.block_mass(k);
    if (to_real(Rational(1) - cum) <= tail_eps) return k;
    if (k > 100000) throw std::runtime_error("SNB truncation did not converge");
  }
}

prob::Pmf snb_pmf(const SnbParams& params, Real tail_eps) {
  const std::uint64_t K = snb_last_block(params, tail_eps);
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k <= K; ++k) {
    total += params.block_size(k);
    if (total > 5'000'000) throw std::length_error("SNB truncated support too large");
  }
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  labels.reserve(total);
  weights.reserve(total);
  Rational listed(0);
  for (std::uint64_t k = 0; k <= K; ++k) {
    Rational w = params.atom_weight(k);
    std::uint64_t s = params.block_size(k);
    for (std::uint64_t i = 0; i < s; ++i) {
      labels.push_back(std::to_string(k) + ":" + std::to_string(i));
      weights.push_back(w);
    }
    listed += params.block_mass(k);
  }
  return prob::Pmf::from_rationals(std::move(labels), std::move(weights), Rational(1) - listed);
}

namespace {

struct Affine {
  Real offset;
  Real step;
};

Affine spectrum_line(const SnbParams& q) {
  Real lp = std::log2(to_real(q.p));
  Real off = std::log2(static_cast<Real>(q.a)) - q.r * lp;
  Real step = q.p == 1 ? 0.0L : std::log2(static_cast<Real>(q.b)) - std::log2(to_real(Rational(1) - q.p));
  return {off, step};
}

}  // namespace

StepCdf snb_spectrum(const SnbParams& params, Real tail_eps) {
  const std::uint64_t K = snb_last_block(params, tail_eps);
  auto line = spectrum_line(params);
  std::vector<spectrum::Atom> atoms;
  Real total = 0;
  for (std::uint64_t k = 0; k <= K; ++k) {
    Real m = to_real(params.block_mass(k));
    atoms.push_back({line.offset + k * line.step, m});
    total += m;
  }
  for (auto& a : atoms) a.mass /= total;
  return StepCdf(std::move(atoms));
}

StepCdf snb_spectrum_root(const SnbParams& params, int n, Real tail_eps) {
  params.validate();
  if (n < 1) throw std::invalid_argument("snb_spectrum_root: n must be positive");
  auto line = spectrum_line(params);
  if (params.p == 1) return StepCdf::point(line.offset / n);
  const Real p = to_real(params.p);
  const Real rn = static_cast<Real>(params.r) / n;
  std::vector<spectrum::Atom> atoms;
  Real w = std::pow(p, rn), cum = 0;
  for (std::uint64_t k = 0;; ++k) {
    atoms.push_back({line.offset / n + k * line.step, w});
    cum += w;
    if (1 - cum <= tail_eps && k + 1 > rn * (1 - p) / p) break;
    w = w * (1 - p) * (k + rn) / (k + 1);
    if (k > 1000000) throw std::runtime_error("NegBin root truncation did not converge");
  }
  for (auto& a : atoms) a.mass /= cum;
  return StepCdf(std::move(atoms));
}

SnbIndex SnbCombination::map(SnbIndex x1, SnbIndex x2) const {
  const std::uint64_t k = x1.block + x2.block;
  std::uint64_t offset = 0;
  for (std::uint64_t j = 0; j < x1.block; ++j) offset += params1.block_size(j) * params2.block_size(k - j);
  return {k, offset + x1.pos * params2.block_size(x2.block) + x2.pos};
}

SnbCombination snb_combine(const SnbParams& p1, const SnbParams& p2) {
  p1.validate();
  p2.validate();
  if (p1.p != p2.p) throw std::invalid_argument("snb_combine: p differs");
  if (p1.b != p2.b) throw std::invalid_argument("snb_combine: b differs");
  SnbParams out;
  out.r = p1.r + p2.r;
  out.p = p1.p;
  out.a = p1.a * p2.a;
  out.b = p1.b;
  return {p1, p2, out};
}

CombineCheck verify_snb_combine(const SnbCombination& c, std::uint64_t max_block) {
  CombineCheck out;
  out.injective = true;
  out.weights_match = true;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (std::uint64_t k1 = 0; k1 <= max_block; ++k1)
    for (std::uint64_t k2 = 0; k1 + k2 <= max_block; ++k2) {
      Rational w = c.params1.atom_weight(k1) * c.params2.atom_weight(k2);
      bool weight_ok = w == c.result.atom_weight(k1 + k2);
      const std::uint64_t s1 = c.params1.block_size(k1), s2 = c.params2.block_size(k2);
      const std::uint64_t limit = c.result.block_size(k1 + k2);
      for (std::uint64_t i1 = 0; i1 < s1; ++i1)
        for (std::uint64_t i2 = 0; i2 < s2; ++i2) {
          auto y = c.map({k1, i1}, {k2, i2});
          ++out.pairs;
          if (y.block != k1 + k2 || y.pos >= limit || !seen.emplace(y.block, y.pos).second) out.injective = false;
          if (!weight_ok) out.weights_match = false;
        }
    }
  std::uint64_t expected = 0;
  for (std::uint64_t k = 0; k <= max_block; ++k) expected += c.result.block_size(k);
  out.covers_blocks = seen.size() == expected;
  return out;
}

prob::Pmf combine_pushforward(const SnbCombination& c, std::uint64_t max_block) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> mass;
  for (std::uint64_t k1 = 0; k1 <= max_block; ++k1)
    for (std::uint64_t k2 = 0; k1 + k2 <= max_block; ++k2) {
      Rational w = c.params1.atom_weight(k1) * c.params2.atom_weight(k2);
      for (std::uint64_t i1 = 0; i1 < c.params1.block_size(k1); ++i1)
        for (std::uint64_t i2 = 0; i2 < c.params2.block_size(k2); ++i2) {
          auto y = c.map({k1, i1}, {k2, i2});
          mass[{y.block, y.pos}] += w;
        }
    }
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  Rational total(0);
  for (auto& [key, w] : mass) {
    if (sgn(w) == 0) continue;
    labels.push_back(std::to_string(key.first) + ":" + std::to_string(key.second));
    weights.push_back(w);
    total += w;
  }
  return prob::Pmf::from_rationals(std::move(labels), std::move(weights), Rational(1) - total);
}

RidBound r_id_upper(const StepCdf& f, const std::optional<PowerHint>& hint, const RunConfig& cfg) {
  RidBound best;
  auto t1 = divide::dominate_infdiv(f, cfg);
  best.method = "theorem1";
  best.value = t1.mean_ratio;
  best.witness = t1.law();
  best.dominance_gap = t1.dominance_gap;
  if (hint) {
    if (hint->m < 2) throw std::invalid_argument("r_id_upper: power hint needs m >= 2");
    // Mean and support ends of an m-fold power are determined by the base.
    const Real m = hint->m;
    auto close = [](Real a, Real b) { return std::fabs(a - b) <= 1e-9L * std::max(1.0L, std::fabs(b)); };
    if (!close(spectrum::mean(f), m * spectrum::mean(hint->base)) || !close(f.min_t(), m * hint->base.min_t()) ||
        !close(f.max_t(), m * hint->base.max_t()))
      throw std::invalid_argument("r_id_upper: hint base does not reproduce the cdf");
    auto t4 = uniform::theorem4_construct(hint->base, hint->m, cfg.max_depth, cfg);
    if (t4.achieved_ratio < best.value) {
      best.method = t4.depth == 0 ? "theorem1" : "lemma1-recursive";
      best.value = t4.achieved_ratio;
      best.witness = t4.law;
      best.dominance_gap = t4.dominance_gap;
    }
  }
  if (best.value > kE / (kE - 1) + 1e-9L) throw VerificationError("sid.r_id", "upper bound above e/(e-1)");
  return best;
}

}  // namespace infodiv::sid
