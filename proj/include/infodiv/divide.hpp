#pragma once

#include "infodiv/compound_poisson.hpp"
#include "infodiv/config.hpp"
#include "infodiv/geom_map.hpp"
#include "infodiv/pmf.hpp"
#include "infodiv/spectrum.hpp"

#include <optional>
#include <string>
#include <variant>

namespace infodiv::divide {

// Z = F^{-1}(U) - F^{-1}(zeta) with U uniform on [zeta, 1].
struct QuantileRestriction {
  Real g0;
  StepCdf jumps;
};
QuantileRestriction quantile_restriction(const StepCdf& f, Real zeta);

struct Theorem1Result {
  std::optional<int> n;  // empty for n = infinity
  Real zeta = 0;
  Real offset_g0 = 0;
  StepCdf jump_pmf;
  // Finite n: the law of g0/n + Bern(1/n) Z. Infinite n: the compound
  // Poisson law itself (every root of it is available through root()).
  std::variant<StepCdf, CompoundPoissonLaw> root_cdf;
  StepCdf dominating_cdf;
  Real dominating_mean = 0;  // from the symbolic fields
  Real mean_ratio = 1;
  Real poisson_tail = 0;
  Real dominance_gap = 0;  // max_t F_V(t) - F(t), negative when strict
  bool coarsened = false;

  const CompoundPoissonLaw& law() const { return std::get<CompoundPoissonLaw>(root_cdf); }
};

// Symbolic laws without materialization.
CompoundPoissonLaw infdiv_law(const StepCdf& f);

Theorem1Result dominate_ndiv(const StepCdf& f, int n, const RunConfig& cfg = {});
Theorem1Result dominate_infdiv(const StepCdf& f, const RunConfig& cfg = {});

// Mass ratio bound 1 / (1 - (1 - 1/n)^n); n = 0 stands for infinity.
Real theorem1_factor(int n);

// Materializes a compound Poisson dominator and checks it against target.
// Retries once with a larger atom cap before reporting failure.
struct DominanceCheck {
  bool ok;
  Real gap;
  Real poisson_tail;
  bool coarsened;
  StepCdf materialized;
};
DominanceCheck check_dominance(const CompoundPoissonLaw& law, const StepCdf& target, const RunConfig& cfg,
                               Real mass_tol = 1e-9L);

// ---- booster -------------------------------------------------------------

prob::LazyPmf booster_pmf(int n);

struct BoosterWitness {
  int n;
  int depth;
  Real max_cdf_error;  // max_k |P(max of n copies <= k) - (1 - 2^{-k})|
  bool ok;
};
BoosterWitness booster_witness(int n, int depth = 60);
Real booster_entropy_bound(int n);

// ---- bounds ---------------------------------------------------------------

Real additive_term(Real H, int n);
// H / (n (1 - (1 - 1/n)^n)) + min{2.43, additive term}
Real bound_theorem2(Real H, int n);
// Same with the multiplicative factor replaced by an achieved ratio.
Real bound_with_ratio(Real H, int n, Real ratio);

// ---- division pipelines ---------------------------------------------------

struct Verdicts {
  bool dominance = false;
  bool info_majorization = false;
  bool info_majorization_checked = false;
  bool majorization = false;
  bool entropy_sandwich = false;
  bool booster_witness = false;
  bool aggregation = false;
  bool aggregation_checked = false;
};

struct DivisionCertificate {
  int n = 1;
  prob::Pmf p_X;
  prob::Pmf p_Y;
  prob::LazyPmf p_B = booster_pmf(1);
  prob::Pmf p_Z;  // p_Y x p_B truncated at tail_eps
  std::string map_description;
  Real H_X = 0;
  Real H_Y = 0;
  prob::EntropyBound H_B{0, 0};
  Real H_Z1 = 0;        // H_Y + lower estimate of H_B
  Real tail_slack = 0;  // certified bound on the neglected booster entropy
  Real lower_bound = 0;
  Real upper_bound = 0;
  Real multiplicative_factor = 1;
  Real additive = 0;
  Real mean_ratio = 1;
  std::string dominator;  // which construction produced the root
  Verdicts verdicts;
  BoosterWitness witness{};
  std::optional<GeomMap> aggregation_map;
};

DivisionCertificate divide_pmf(const prob::Pmf& p_X, int n, const RunConfig& cfg = {});
// X = Y^m for i.i.d. Y ~ p_Y_base, handled through spectra only.
DivisionCertificate divide_iid(const prob::Pmf& p_Y_base, int m, int n, const RunConfig& cfg = {});

// Floors p to a dyadic grid so that it stays majorization-compatible with
// target after the n-fold power. Empty when no grid attempt passes.
std::optional<prob::Pmf> rationalize_root(const prob::Pmf& p, int n, const prob::Pmf& target);

}  // namespace infodiv::divide
