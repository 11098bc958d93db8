#pragma once

#include "infodiv/numeric.hpp"

#include <vector>

namespace infodiv::dist {

// P(N = k) for k = 0..K where K is the first index with P(N > K) <= eps.
// The second member is P(N > K).
struct Truncated {
  std::vector<Real> pmf;
  Real tail;
};

Truncated poisson(Real lambda, Real eps);
std::vector<Real> poisson_range(Real lambda, int k_max);
std::vector<Real> binomial(int n, Real p);

}  // namespace infodiv::dist
