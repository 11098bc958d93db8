#include "infodiv/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace infodiv::dist {

namespace {

Real poisson_term(Real lambda, int k) {
  if (lambda == 0) return k == 0 ? 1.0L : 0.0L;
  return std::exp(-lambda + k * std::log(lambda) - std::lgamma(static_cast<Real>(k) + 1));
}

}  // namespace

std::vector<Real> poisson_range(Real lambda, int k_max) {
  std::vector<Real> out(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) out[k] = poisson_term(lambda, k);
  return out;
}

Truncated poisson(Real lambda, Real eps) {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("poisson: bad rate");
  Truncated t;
  Real cum = 0;
  for (int k = 0;; ++k) {
    Real w = poisson_term(lambda, k);
    t.pmf.push_back(w);
    cum += w;
    // Past the mode the remaining tail is below w * lambda / (k + 1 - lambda).
    Real tail = 1 - cum;
    if (k + 1 > lambda) {
      Real geometric = w * lambda / (k + 1 - lambda);
      tail = std::min(std::max(tail, 0.0L), geometric);
    }
    if (k >= lambda && tail <= eps) {
      t.tail = std::max(tail, 0.0L);
      return t;
    }
    if (k > 100000) throw std::runtime_error("poisson truncation did not converge");
  }
}

std::vector<Real> binomial(int n, Real p) {
  if (n < 0 || !(p >= 0 && p <= 1)) throw std::invalid_argument("binomial: bad parameters");
  std::vector<Real> out(static_cast<std::size_t>(n) + 1, 0.0L);
  if (p == 0) { out[0] = 1; return out; }
  if (p == 1) { out[n] = 1; return out; }
  for (int k = 0; k <= n; ++k) {
    Real lc = std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
    out[k] = std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
  }
  return out;
}

}  // namespace infodiv::dist
