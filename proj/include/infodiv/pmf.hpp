#pragma once

#include "infodiv/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace infodiv::prob {

enum class Mode { exact, floating };

// Finite pmf with labels. Exact pmfs carry rational weights alongside their
// long double images. A pmf produced by truncating a lazy factor records the
// dropped probability in tail_mass().
class Pmf {
 public:
  Pmf() = default;

  static Pmf from_floats(std::vector<std::string> labels, std::vector<Real> weights,
                         Real tail_mass = 0.0L, Real tol = 1e-12L);
  static Pmf from_floats(std::vector<Real> weights);
  // tail is the exact probability not listed (truncated supports).
  static Pmf from_rationals(std::vector<std::string> labels, std::vector<Rational> weights,
                            const Rational& tail = Rational(0));
  static Pmf from_rationals(std::vector<Rational> weights);
  static Pmf point_mass(std::string label = "1");

  Mode mode() const { return exact_.empty() ? Mode::floating : Mode::exact; }
  bool exact() const { return !exact_.empty(); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Real>& weights() const { return weights_; }
  const std::vector<Rational>& exact_weights() const { return exact_; }
  Real tail_mass() const { return tail_mass_; }
  const Rational& exact_tail() const { return exact_tail_; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  // Stable sort by descending weight.
  Pmf sorted() const;
  Pmf without_zeros() const;
  Pmf as_float() const;
  Pmf relabeled(std::vector<std::string> labels) const;

  bool operator==(const Pmf& other) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Real> weights_;
  std::vector<Rational> exact_;
  Real tail_mass_ = 0.0L;
  Rational exact_tail_{0};
};

std::vector<std::string> numbered_labels(std::size_t n);

Real entropy(const Pmf& p);

// Infinite-support pmf over {1, 2, ...} given by closed forms.
struct EntropyBound {
  Real lower;
  Real upper;
};

class LazyPmf {
 public:
  using WeightFn = std::function<Real(std::uint64_t)>;
  using TailFn = std::function<Real(std::uint64_t)>;

  // tail(K) bounds P(index > K); tail_entropy(K) bounds the entropy
  // contribution of indices above K.
  LazyPmf(std::string name, WeightFn weight, TailFn tail, TailFn tail_entropy,
          std::function<std::optional<Rational>(std::uint64_t)> exact_weight = {});

  const std::string& name() const { return name_; }
  Real weight(std::uint64_t k) const { return weight_(k); }
  Real tail_after(std::uint64_t k) const { return tail_(k); }
  Real tail_entropy_after(std::uint64_t k) const { return tail_entropy_(k); }
  std::optional<Rational> exact_weight(std::uint64_t k) const;

  // Smallest K with tail_after(K) <= eps.
  std::uint64_t truncation_index(Real eps) const;
  Pmf truncate(Real eps) const;
  EntropyBound entropy(Real eps) const;

 private:
  std::string name_;
  WeightFn weight_;
  TailFn tail_;
  TailFn tail_entropy_;
  std::function<std::optional<Rational>(std::uint64_t)> exact_weight_;
};

LazyPmf geometric_half();

Pmf product(const Pmf& p, const Pmf& q);
// Product with a lazy factor truncated so its tail is at most tail_eps.
Pmf product(const Pmf& p, const LazyPmf& q, Real tail_eps);

// ---- majorization -------------------------------------------------------

template <class W>
std::vector<W> sorted_desc(std::span<const W> v) {
  std::vector<W> out(v.begin(), v.end());
  std::stable_sort(out.begin(), out.end(), [](const W& a, const W& b) { return a > b; });
  return out;
}

// Top-k prefix sums of p are compared with those of q up to |supp(q)|, and
// against the total of q afterwards. slack is added to every right side.
template <class W>
bool majorizes(std::span<const W> p, std::span<const W> q, const W& slack = W(0)) {
  std::vector<W> ps = sorted_desc(p), qs = sorted_desc(q);
  W total_q(0);
  for (const auto& w : qs) total_q += w;
  std::size_t supp_q = 0;
  for (const auto& w : qs) if (w > W(0)) ++supp_q;
  W sp(0), sq(0);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    sp += ps[k];
    if (k < supp_q) sq += qs[k]; else sq = total_q;
    if (sp > sq + slack) return false;
  }
  return true;
}

bool majorizes(const Pmf& p, const Pmf& q, Real slack = 1e-12L);

// The k largest entries of p^{xn} with multiplicity, in descending order.
// Ties are broken by the lexicographic order of sorted index tuples.
template <class W>
std::vector<W> tensor_power_topk(std::span<const W> p, int n, std::uint64_t k) {
  if (n < 1) throw std::out_of_range("tensor_power_topk: n must be positive");
  std::vector<W> s = sorted_desc(p);
  const std::size_t m = s.size();
  long double cap = std::pow(static_cast<long double>(m), n);
  if (k == 0 || static_cast<long double>(k) > cap)
    throw std::out_of_range("tensor_power_topk: k out of range");

  // Nondecreasing index tuples index multisets; each accounts for
  // n!/prod(mult!) ordered products.
  using Tuple = std::vector<std::uint32_t>;
  auto value = [&](const Tuple& t) {
    W v(1);
    for (auto i : t) v *= s[i];
    return v;
  };
  auto multiplicity = [&](const Tuple& t) {
    long double c = 1;
    int run = 0;
    for (int i = 0; i < n; ++i) {
      c *= (i + 1);
      run = (i > 0 && t[i] == t[i - 1]) ? run + 1 : 1;
      c /= run;
    }
    return static_cast<std::uint64_t>(std::llround(c));
  };
  struct Node {
    W v;
    Tuple t;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.v != b.v) return a.v < b.v;
    return a.t > b.t;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  std::set<Tuple> seen;
  Tuple start(n, 0);
  heap.push({value(start), start});
  seen.insert(start);
  std::vector<W> out;
  out.reserve(k);
  while (out.size() < k && !heap.empty()) {
    Node top = heap.top();
    heap.pop();
    std::uint64_t c = multiplicity(top.t);
    for (std::uint64_t j = 0; j < c && out.size() < k; ++j) out.push_back(top.v);
    for (int i = 0; i < n; ++i) {
      if (top.t[i] + 1 >= m) continue;
      if (i + 1 < n && top.t[i] + 1 > top.t[i + 1]) continue;
      Tuple nt = top.t;
      ++nt[i];
      if (seen.insert(nt).second) heap.push({value(nt), nt});
    }
  }
  return out;
}

std::vector<Real> tensor_power_topk(const Pmf& p, int n, std::uint64_t k);
std::vector<Rational> tensor_power_topk_exact(const Pmf& p, int n, std::uint64_t k);

// Is p^{xn} majorized by q? Only the first |supp(q)| prefix sums are needed,
// since later ones are compared with 1 and the total of p^{xn} is 1.
bool power_majorizes(const Pmf& p, int n, const Pmf& q, Real slack = 1e-12L);

// ---- aggregation --------------------------------------------------------

struct AggregationMap {
  std::map<std::string, std::string> assignments;
};

Pmf apply_aggregation(const Pmf& p, const AggregationMap& g);
bool verify_aggregation(const Pmf& p, const Pmf& q, const AggregationMap& g, Real tol = 1e-12L);

}  // namespace infodiv::prob
