#include "infodiv/pmf.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace infodiv::prob {

namespace {

void check_labels(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw std::invalid_argument("duplicate label: " + l);
}

}  // namespace

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i + 1);
  return out;
}

Pmf Pmf::from_floats(std::vector<std::string> labels, std::vector<Real> weights, Real tail_mass,
                     Real tol) {
  if (labels.size() != weights.size()) throw std::invalid_argument("labels/weights size mismatch");
  if (labels.empty()) throw std::invalid_argument("empty pmf");
  check_labels(labels);
  Real total = tail_mass;
  for (Real w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("negative or non-finite weight");
    total += w;
  }
  if (std::fabs(total - 1) > tol)
    throw std::invalid_argument("weights do not sum to 1 (sum=" + std::to_string(static_cast<double>(total)) + ")");
  Pmf p;
  p.labels_ = std::move(labels);
  p.weights_ = std::move(weights);
  p.tail_mass_ = tail_mass;
  return p;
}

Pmf Pmf::from_floats(std::vector<Real> weights) {
  auto labels = numbered_labels(weights.size());
  return from_floats(std::move(labels), std::move(weights));
}

Pmf Pmf::from_rationals(std::vector<std::string> labels, std::vector<Rational> weights, const Rational& tail) {
  if (labels.size() != weights.size()) throw std::invalid_argument("labels/weights size mismatch");
  if (labels.empty()) throw std::invalid_argument("empty pmf");
  check_labels(labels);
  Rational total(0);
  for (const auto& w : weights) {
    if (sgn(w) < 0) throw std::invalid_argument("negative weight");
    total += w;
  }
  if (sgn(tail) < 0) throw std::invalid_argument("negative tail mass");
  if (total + tail != 1) throw std::invalid_argument("exact weights do not sum to 1");
  Pmf p;
  p.exact_tail_ = tail;
  p.tail_mass_ = to_real(tail);
  p.labels_ = std::move(labels);
  p.weights_.reserve(weights.size());
  for (const auto& w : weights) p.weights_.push_back(to_real(w));
  p.exact_ = std::move(weights);
  return p;
}

Pmf Pmf::from_rationals(std::vector<Rational> weights) {
  auto labels = numbered_labels(weights.size());
  return from_rationals(std::move(labels), std::move(weights));
}

Pmf Pmf::point_mass(std::string label) {
  return from_rationals({std::move(label)}, {Rational(1)});
}

std::optional<std::size_t> Pmf::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

Pmf Pmf::sorted() const {
  std::vector<std::size_t> idx(size());
  std::iota(idx.begin(), idx.end(), 0);
  if (exact()) {
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return exact_[a] > exact_[b]; });
  } else {
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return weights_[a] > weights_[b]; });
  }
  Pmf out = *this;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.labels_[i] = labels_[idx[i]];
    out.weights_[i] = weights_[idx[i]];
    if (exact()) out.exact_[i] = exact_[idx[i]];
  }
  return out;
}

Pmf Pmf::without_zeros() const {
  Pmf out;
  out.tail_mass_ = tail_mass_;
  out.exact_tail_ = exact_tail_;
  for (std::size_t i = 0; i < size(); ++i) {
    bool zero = exact() ? sgn(exact_[i]) == 0 : weights_[i] == 0;
    if (zero) continue;
    out.labels_.push_back(labels_[i]);
    out.weights_.push_back(weights_[i]);
    if (exact()) out.exact_.push_back(exact_[i]);
  }
  return out;
}

Pmf Pmf::as_float() const {
  Pmf out = *this;
  out.exact_.clear();
  out.exact_tail_ = 0;
  return out;
}

Pmf Pmf::relabeled(std::vector<std::string> labels) const {
  if (labels.size() != size()) throw std::invalid_argument("relabel size mismatch");
  check_labels(labels);
  Pmf out = *this;
  out.labels_ = std::move(labels);
  return out;
}

bool Pmf::operator==(const Pmf& other) const {
  if (labels_ != other.labels_ || exact() != other.exact()) return false;
  if (exact()) return exact_ == other.exact_ && exact_tail_ == other.exact_tail_;
  return weights_ == other.weights_ && tail_mass_ == other.tail_mass_;
}

Real entropy(const Pmf& p) {
  Real h = 0;
  for (Real w : p.weights()) h += plogp(w);
  return h;
}

// ---- lazy pmfs ----------------------------------------------------------

LazyPmf::LazyPmf(std::string name, WeightFn weight, TailFn tail, TailFn tail_entropy,
                 std::function<std::optional<Rational>(std::uint64_t)> exact_weight)
    : name_(std::move(name)),
      weight_(std::move(weight)),
      tail_(std::move(tail)),
      tail_entropy_(std::move(tail_entropy)),
      exact_weight_(std::move(exact_weight)) {}

std::optional<Rational> LazyPmf::exact_weight(std::uint64_t k) const {
  if (!exact_weight_) return std::nullopt;
  return exact_weight_(k);
}

std::uint64_t LazyPmf::truncation_index(Real eps) const {
  if (!(eps > 0)) throw std::invalid_argument("truncation eps must be positive");
  std::uint64_t k = 1;
  while (tail_(k) > eps) {
    ++k;
    if (k > 100000) throw std::runtime_error("lazy pmf tail does not decay");
  }
  return k;
}

Pmf LazyPmf::truncate(Real eps) const {
  std::uint64_t K = truncation_index(eps);
  std::vector<Real> w(K);
  for (std::uint64_t k = 1; k <= K; ++k) w[k - 1] = weight_(k);
  Real tail = tail_(K);
  // Closed-form weights and tail can disagree in the last ulp.
  return Pmf::from_floats(numbered_labels(K), std::move(w), tail, 1e-12L);
}

EntropyBound LazyPmf::entropy(Real eps) const {
  std::uint64_t K = truncation_index(eps);
  Real h = 0;
  for (std::uint64_t k = 1; k <= K; ++k) h += plogp(weight_(k));
  return {h, h + tail_entropy_(K)};
}

LazyPmf geometric_half() {
  return LazyPmf(
      "Geom(1/2)", [](std::uint64_t k) { return std::ldexp(1.0L, -static_cast<int>(k)); },
      [](std::uint64_t K) { return std::ldexp(1.0L, -static_cast<int>(K)); },
      // sum_{k>K} k 2^{-k} = (K+2) 2^{-K}
      [](std::uint64_t K) { return (K + 2.0L) * std::ldexp(1.0L, -static_cast<int>(K)); },
      [](std::uint64_t k) -> std::optional<Rational> {
        mpz_class den(1);
        den <<= k;
        return Rational(mpz_class(1), den);
      });
}

Pmf product(const Pmf& p, const Pmf& q) {
  std::vector<std::string> labels;
  labels.reserve(p.size() * q.size());
  for (const auto& a : p.labels())
    for (const auto& b : q.labels()) labels.push_back("(" + a + "," + b + ")");
  if (p.exact() && q.exact()) {
    std::vector<Rational> w;
    w.reserve(labels.size());
    for (const auto& a : p.exact_weights())
      for (const auto& b : q.exact_weights()) w.push_back(a * b);
    Rational tail = Rational(1) - (Rational(1) - p.exact_tail()) * (Rational(1) - q.exact_tail());
    return Pmf::from_rationals(std::move(labels), std::move(w), tail);
  }
  std::vector<Real> w;
  w.reserve(labels.size());
  for (Real a : p.weights())
    for (Real b : q.weights()) w.push_back(a * b);
  Real tail = 1 - (1 - p.tail_mass()) * (1 - q.tail_mass());
  return Pmf::from_floats(std::move(labels), std::move(w), tail, 1e-10L);
}

Pmf product(const Pmf& p, const LazyPmf& q, Real tail_eps) {
  return product(p, q.truncate(tail_eps));
}

bool majorizes(const Pmf& p, const Pmf& q, Real slack) {
  if (p.exact() && q.exact()) {
    return majorizes<Rational>(std::span<const Rational>(p.exact_weights()),
                               std::span<const Rational>(q.exact_weights()));
  }
  return majorizes<Real>(std::span<const Real>(p.weights()), std::span<const Real>(q.weights()), slack);
}

std::vector<Real> tensor_power_topk(const Pmf& p, int n, std::uint64_t k) {
  return tensor_power_topk<Real>(std::span<const Real>(p.weights()), n, k);
}

std::vector<Rational> tensor_power_topk_exact(const Pmf& p, int n, std::uint64_t k) {
  if (!p.exact()) throw std::invalid_argument("tensor_power_topk_exact needs an exact pmf");
  return tensor_power_topk<Rational>(std::span<const Rational>(p.exact_weights()), n, k);
}

bool power_majorizes(const Pmf& p, int n, const Pmf& q, Real slack) {
  Pmf pp = p.without_zeros();
  std::size_t l = q.without_zeros().size();
  long double cap = std::pow(static_cast<long double>(pp.size()), n);
  auto k = static_cast<std::uint64_t>(std::min<long double>(cap, static_cast<long double>(l)));
  if (pp.exact() && q.exact()) {
    auto top = tensor_power_topk_exact(pp, n, k);
    return majorizes<Rational>(std::span<const Rational>(top), std::span<const Rational>(q.exact_weights()));
  }
  auto top = tensor_power_topk(pp, n, k);
  return majorizes<Real>(std::span<const Real>(top), std::span<const Real>(q.weights()), slack);
}

Pmf apply_aggregation(const Pmf& p, const AggregationMap& g) {
  std::vector<std::string> targets;
  std::map<std::string, std::size_t> slot;
  std::vector<Real> w;
  std::vector<Rational> ew;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto it = g.assignments.find(p.labels()[i]);
    if (it == g.assignments.end()) {
      bool zero = p.exact() ? sgn(p.exact_weights()[i]) == 0 : p.weights()[i] == 0;
      if (zero) continue;
      throw std::invalid_argument("aggregation map misses label " + p.labels()[i]);
    }
    auto [pos, fresh] = slot.emplace(it->second, targets.size());
    if (fresh) {
      targets.push_back(it->second);
      w.push_back(0);
      ew.emplace_back(0);
    }
    w[pos->second] += p.weights()[i];
    if (p.exact()) ew[pos->second] += p.exact_weights()[i];
  }
  if (p.exact()) return Pmf::from_rationals(std::move(targets), std::move(ew));
  return Pmf::from_floats(std::move(targets), std::move(w), p.tail_mass(), 1e-9L);
}

bool verify_aggregation(const Pmf& p, const Pmf& q, const AggregationMap& g, Real tol) {
  Pmf push;
  try {
    push = apply_aggregation(p, g);
  } catch (const std::invalid_argument&) {
    return false;
  }
  const bool exact = push.exact() && q.exact();
  for (std::size_t j = 0; j < push.size(); ++j)
    if (!q.index_of(push.labels()[j])) {
      bool zero = exact ? sgn(push.exact_weights()[j]) == 0 : push.weights()[j] <= tol;
      if (!zero) return false;
    }
  for (std::size_t j = 0; j < q.size(); ++j) {
    auto pos = push.index_of(q.labels()[j]);
    if (exact) {
      Rational got = pos ? push.exact_weights()[*pos] : Rational(0);
      if (got != q.exact_weights()[j]) return false;
    } else {
      Real got = pos ? push.weights()[*pos] : 0.0L;
      if (std::fabs(got - q.weights()[j]) > tol) return false;
    }
  }
  return true;
}

}  // namespace infodiv::prob
