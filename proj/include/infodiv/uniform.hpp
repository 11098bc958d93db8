#pragma once

#include "infodiv/compound_poisson.hpp"
#include "infodiv/config.hpp"
#include "infodiv/spectrum.hpp"

#include <functional>
#include <string>
#include <vector>

namespace infodiv::uniform {

using divide::CompoundPoissonLaw;
using spectrum::StepCdf;

// Supplies an infinitely divisible dominator of base^{*power}.
using InnerBuilder = std::function<CompoundPoissonLaw(const StepCdf& base, int power)>;

struct Lemma1Step {
  Real gamma = 0;
  int m = 0;
  Real lambda = 0;
  Real zeta = 0;
  int n_tilde = 0;
  Real g0 = 0;
  StepCdf jumps;  // law of Z
  CompoundPoissonLaw inner;
  CompoundPoissonLaw result;
  Real inner_ratio = 1;  // E(inner) / (n_tilde E(Z))
  Real ratio = 1;        // E(result) / E(base^{*m})
  Real ratio_bound = 0;  // (1 + 2 gamma / m)(2 - 1 / gamma)
  bool verified = false;
  Real dominance_gap = 0;
};

// Builds the law symbolically. With verify set, materializes it against
// base^{*m}; the ratio bound is asserted whenever inner_ratio <= gamma.
Lemma1Step lemma1_construct(const StepCdf& base, int m, Real gamma, const InnerBuilder& inner,
                            const RunConfig& cfg = {}, bool verify = true);

Real lemma1_bound(Real gamma, int m);

struct Theorem4Schedule {
  long m = 0;
  Real alpha = 0;
  Real beta = 0;
  Real psi = 0;
  long k = 0;
  Real gamma_k = 0;
  long m_k = 0;
  Real guaranteed_ratio = 0;
};

Theorem4Schedule theorem4_schedule(long m);
// gamma_k = ((k+e)/(k+e-1))^alpha
Real schedule_gamma(long k, Real alpha);
Real theorem4_bound(long m);

struct Theorem4Result {
  CompoundPoissonLaw law;
  Real achieved_ratio = 1;
  int depth = 0;
  std::string method;
  Real gamma = 0;  // outer gamma for depth >= 1
  std::vector<Real> ratio_by_depth;
  Real dominance_gap = 0;
};

// Minimum-mean law over the Thm 1 construction on base^{*m} and Lemma 1
// recursions up to max_depth. The selected law is checked against base^{*m}.
Theorem4Result theorem4_construct(const StepCdf& base, int m, int max_depth, const RunConfig& cfg = {});

struct BinPoiReport {
  bool dominated = false;
  bool hypothesis = false;  // a >= n / gamma^2
  Real max_violation = 0;   // max_k F_{N+a+1}(k) - F_M(k)
};

BinPoiReport bin_poi_report(Real gamma, int n, int a);
bool verify_bin_poi_dominance(Real gamma, int n, int a);

}  // namespace infodiv::uniform
