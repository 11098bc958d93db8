#include "infodiv/iidca.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace infodiv::iidca {

namespace {

constexpr Real kSlack = 1e-12L;

std::vector<Real> descending(const prob::Pmf& p) {
  std::vector<Real> w;
  for (Real x : p.weights())
    if (x > 0) w.push_back(x);
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

std::vector<Real> prefix(const std::vector<Real>& v) {
  std::vector<Real> out(v.size());
  std::partial_sum(v.begin(), v.end(), out.begin());
  return out;
}

// Top-k sums of v^{xn} for k <= l against those of p_X, then the total.
bool feasible_topk(const std::vector<Real>& v, int n, const std::vector<Real>& px_prefix) {
  Real total = 0;
  for (Real x : v) total += x;
  if (std::pow(total, static_cast<Real>(n)) > 1 + kSlack) return false;
  const std::size_t l = px_prefix.size();
  std::vector<Real> pos;
  for (Real x : v)
    if (x > 0) pos.push_back(x);
  if (pos.empty()) return true;
  long double cap = std::pow(static_cast<long double>(pos.size()), n);
  auto k = static_cast<std::uint64_t>(std::min<long double>(cap, static_cast<long double>(l)));
  auto top = prob::tensor_power_topk<Real>(std::span<const Real>(pos), n, k);
  Real acc = 0;
  for (std::size_t i = 0; i < top.size(); ++i) {
    acc += top[i];
    if (acc > px_prefix[i] + kSlack) return false;
  }
  return true;
}

std::vector<std::size_t> active_constraints(const std::vector<Real>& v, int n, const std::vector<Real>& px_prefix) {
  std::vector<Real> pos;
  for (Real x : v)
    if (x > 0) pos.push_back(x);
  const std::size_t l = px_prefix.size();
  long double cap = std::pow(static_cast<long double>(pos.size()), n);
  auto k = static_cast<std::uint64_t>(std::min<long double>(cap, static_cast<long double>(l)));
  auto top = prob::tensor_power_topk<Real>(std::span<const Real>(pos), n, k);
  std::vector<std::size_t> out;
  Real acc = 0;
  for (std::size_t i = 0; i < l; ++i) {
    if (i < top.size()) acc += top[i];
    if (std::fabs(acc - px_prefix[i]) <= 1e-9L) out.push_back(i + 1);
  }
  // Past l the constraints read top-k <= 1; the first that can bind is k = |supp q|^n.
  if (cap > static_cast<long double>(l)) {
    Real total = std::accumulate(pos.begin(), pos.end(), 0.0L);
    if (std::fabs(std::pow(total, static_cast<Real>(n)) - 1) <= 1e-9L)
      out.push_back(static_cast<std::size_t>(std::min<long double>(cap, 1e18L)));
  }
  return out;
}

prob::Pmf finish(std::vector<Real> q, Real tol) {
  auto labels = prob::numbered_labels(q.size());
  return prob::Pmf::from_floats(std::move(labels), std::move(q), 0, tol);
}

}  // namespace

IidcaResult iidca_greedy(const prob::Pmf& p_X, int n, Real tol) {
  if (n < 1) throw std::invalid_argument("iidca: n must be positive");
  if (!(tol > 0)) throw std::invalid_argument("iidca: tol must be positive");
  const auto px = descending(p_X);
  const auto px_prefix = prefix(px);
  const std::size_t l = px.size();
  IidcaResult r;
  r.n = n;
  std::vector<Real> q{std::pow(px.front(), 1.0L / n)};
  r.per_step_active_constraints.push_back(active_constraints(q, n, px_prefix));
  while (q.size() < l) {
    Real lo = 0, hi = q.back();
    std::vector<Real> v = q;
    v.push_back(hi);
    if (!feasible_topk(v, n, px_prefix)) {
      int it = 0;
      for (; it < 200 && hi - lo > std::numeric_limits<Real>::epsilon() * hi; ++it) {
        Real mid = (lo + hi) / 2;
        v.back() = mid;
        if (feasible_topk(v, n, px_prefix)) lo = mid; else hi = mid;
      }
      if (hi - lo > 1e-15L) throw std::runtime_error("iidca: binary search did not converge");
      v.back() = lo;
    }
    if (v.back() <= tol) break;
    q = v;
    r.per_step_active_constraints.push_back(active_constraints(q, n, px_prefix));
  }
  Real sum = std::accumulate(q.begin(), q.end(), 0.0L);
  if (std::fabs(sum - 1) > 100 * tol || fault_injected("iidca.termination"))
    throw VerificationError("iidca.termination", "q sums to " + std::to_string(static_cast<double>(sum)));
  r.q = finish(q, 100 * tol);
  Real hq = 0;
  for (Real x : q) hq += plogp(x);
  r.lost_information = n * hq - prob::entropy(p_X);
  return r;
}

namespace {

bool feasible_full(const std::vector<Real>& v, int n, const std::vector<Real>& px) {
  std::vector<Real> all{1.0L};
  for (int i = 0; i < n; ++i) {
    std::vector<Real> next;
    for (Real a : all)
      for (Real b : v) next.push_back(a * b);
    all = std::move(next);
  }
  return prob::majorizes<Real>(std::span<const Real>(all), std::span<const Real>(px), kSlack);
}

}  // namespace

prob::Pmf iidca_oracle(const prob::Pmf& p_X, int n) {
  const auto px = descending(p_X);
  if (px.size() > 6 || n > 3 || n < 1) throw std::invalid_argument("iidca_oracle: instance too large");
  std::vector<Real> q{std::pow(px.front(), 1.0L / n)};
  while (q.size() < px.size()) {
    std::vector<Real> v = q;
    v.push_back(0);
    Real lo = 0, width = q.back();
    // Three grid passes; the last one has step 1e-9.
    const Real steps[3] = {width / 1000, width / 1e6, 1e-9L};
    for (Real h : steps) {
      Real best = lo;
      for (int j = 0; j <= 1000; ++j) {
        Real t = std::min(lo + j * h, q.back());
        v.back() = t;
        if (feasible_full(v, n, px)) best = t; else break;
      }
      lo = best;
    }
    if (lo <= 1e-10L) break;
    v.back() = lo;
    q = v;
  }
  return finish(q, 1e-6L);
}

prob::Pmf estimate_pmf_from_samples(const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [_, c] : counts) total += c;
  if (total == 0) throw std::invalid_argument("no samples");
  std::vector<std::string> labels;
  std::vector<Real> w;
  for (const auto& [label, c] : counts) {
    if (c == 0) continue;
    labels.push_back(label);
    w.push_back(static_cast<Real>(c) / total);
  }
  return prob::Pmf::from_floats(std::move(labels), std::move(w), 0, 1e-12L);
}

std::map<std::string, std::uint64_t> read_sample_counts(std::istream& in) {
  std::map<std::string, std::uint64_t> counts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    std::string label = line.substr(0, comma);
    if (first && (label == "label" || label == "sample")) {
      first = false;
      continue;
    }
    first = false;
    std::uint64_t c = 1;
    if (comma != std::string::npos) {
      std::string num = line.substr(comma + 1);
      std::size_t used = 0;
      long long v = std::stoll(num, &used);
      if (v < 0 || used != num.size()) throw std::invalid_argument("bad count: " + num);
      c = static_cast<std::uint64_t>(v);
    }
    counts[label] += c;
  }
  return counts;
}

}  // namespace infodiv::iidca
