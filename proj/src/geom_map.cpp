#include "infodiv/geom_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace infodiv::divide {

namespace {

using Map = std::vector<std::uint32_t>;

template <class W>
W half_pow(std::size_t k) {
  if constexpr (std::is_same_v<W, Rational>) {
    mpz_class den(1);
    den <<= k;
    return Rational(mpz_class(1), den);
  } else {
    return std::ldexp(1.0L, -static_cast<int>(k));
  }
}

template <class W>
struct Solver {
  std::vector<W> p;
  std::vector<std::size_t> order;  // sources by descending mass
  std::vector<W> p_prefix;         // prefix sums of sorted p
  std::size_t l = 0;
  W slack{0};

  Solver(std::vector<W> sources, std::size_t targets) : p(std::move(sources)), l(targets) {
    order.resize(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] > p[b]; });
    W acc(0);
    for (auto i : order) p_prefix.push_back(acc += p[i]);
  }

  bool majorized_by(const std::vector<W>& r) const {
    std::vector<W> s = r;
    std::sort(s.begin(), s.end(), [](const W& a, const W& b) { return a > b; });
    W acc(0);
    for (std::size_t k = 0; k < p_prefix.size(); ++k) {
      if (k < s.size()) acc += s[k];
      if (p_prefix[k] > acc + slack) return false;
    }
    return true;
  }

  std::vector<W> next_residual(const std::vector<W>& R, const Map& g) const {
    std::vector<W> next(l);
    for (std::size_t y = 0; y < l; ++y) next[y] = R[y] + R[y];
    for (std::size_t x = 0; x < p.size(); ++x) next[g[x]] -= p[x];
    if constexpr (!std::is_same_v<W, Rational>) {
      for (auto& v : next)
        if (v < 0 && v >= -slack) v = 0;
    }
    return next;
  }

  bool valid(const std::vector<W>& next) const {
    for (const auto& v : next)
      if (v < W(0)) return false;
    return majorized_by(next);
  }

  // Decreasing sources into the target with the most (worst fit) or least
  // (best fit) remaining room.
  std::optional<Map> greedy(const std::vector<W>& R, bool worst) const {
    std::vector<W> room(l);
    for (std::size_t y = 0; y < l; ++y) room[y] = R[y] + R[y];
    Map g(p.size(), 0);
    for (auto x : order) {
      std::optional<std::size_t> pick;
      for (std::size_t y = 0; y < l; ++y) {
        W left = room[y] - p[x];
        if (left < -slack) continue;
        if (!pick) { pick = y; continue; }
        W cur = room[*pick] - p[x];
        if (worst ? left > cur : left < cur) pick = y;
      }
      if (!pick) return std::nullopt;
      g[x] = static_cast<std::uint32_t>(*pick);
      room[*pick] -= p[x];
    }
    if (!valid(next_residual(R, g))) return std::nullopt;
    return g;
  }

  W min_slack(const std::vector<W>& r) const {
    std::vector<W> s = r;
    std::sort(s.begin(), s.end(), [](const W& a, const W& b) { return a > b; });
    W acc(0), best(2);
    for (std::size_t k = 0; k < p_prefix.size(); ++k) {
      if (k < s.size()) acc += s[k];
      W d = acc - p_prefix[k];
      if (d < best) best = d;
    }
    return best;
  }

  std::optional<Map> exhaustive(const std::vector<W>& R) const {
    const std::size_t m = p.size();
    Map g(m, 0);
    std::optional<Map> best;
    W best_slack(-1);
    while (true) {
      auto next = next_residual(R, g);
      if (valid(next)) {
        W s = min_slack(next);
        if (!best || s > best_slack) { best = g; best_slack = s; }
      }
      std::size_t i = 0;
      while (i < m && ++g[i] == l) g[i++] = 0;
      if (i == m) break;
    }
    return best;
  }
};

std::string describe(const std::vector<Real>& r) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? ", " : "") << static_cast<double>(r[i]);
  os << "]";
  return os.str();
}

template <class W>
std::vector<Real> as_reals(const std::vector<W>& v) {
  std::vector<Real> out;
  for (const auto& x : v) {
    if constexpr (std::is_same_v<W, Rational>) out.push_back(to_real(x));
    else out.push_back(x);
  }
  return out;
}

template <class W>
GeomMap build(std::vector<W> p, std::vector<W> q, const GeomMapOptions& opts, GeomMap g) {
  Solver<W> solver(std::move(p), q.size());
  std::vector<W> R = std::move(q);
  std::map<std::vector<W>, std::size_t> seen;
  const bool exact = std::is_same_v<W, Rational>;
  for (std::size_t level = 0;; ++level) {
    if constexpr (std::is_same_v<W, Rational>) {
      auto [it, fresh] = seen.emplace(R, level);
      if (!fresh) {
        g.period_start = it->second;
        break;
      }
      if (level >= opts.max_levels) break;
    } else {
      if (std::ldexp(1.0L, -static_cast<int>(level)) <= opts.float_residual) break;
      // Residual errors double at every level.
      solver.slack = std::min(1e-6L, 1e-16L * std::ldexp(1.0L, static_cast<int>(level)));
    }
    auto step = solver.greedy(R, true);
    if (!step) step = solver.greedy(R, false);
    if (step) {
      ++g.greedy_steps;
    } else if (solver.p.size() <= opts.exhaustive_limit) {
      step = solver.exhaustive(R);
      if (step) ++g.exhaustive_steps;
    }
    if (!step)
      throw VerificationError("geom_map.fill", "no feasible assignment at level " + std::to_string(level + 1) +
                                                   ", residual " + describe(as_reals(R)));
    R = solver.next_residual(R, *step);
    g.levels.push_back(std::move(*step));
  }
  g.exact = exact;
  if (!g.period_start) {
    if constexpr (std::is_same_v<W, Rational>) g.residual_exact = R;
    g.residual = as_reals(R);
  }
  return g;
}

}  // namespace

std::uint32_t GeomMap::target_of(std::size_t source, std::uint64_t k) const {
  if (k == 0) throw std::out_of_range("geometric index starts at 1");
  if (k <= levels.size()) return levels[k - 1][source];
  if (!period_start) throw std::out_of_range("level beyond the stored prefix of a non-periodic map");
  std::size_t s = *period_start, len = levels.size() - s;
  return levels[s + (k - 1 - s) % len][source];
}

prob::AggregationMap GeomMap::to_aggregation_map(std::uint64_t depth) const {
  prob::AggregationMap out;
  for (std::size_t x = 0; x < source_labels.size(); ++x)
    for (std::uint64_t k = 1; k <= depth; ++k)
      out.assignments["(" + source_labels[x] + "," + std::to_string(k) + ")"] = target_labels[target_of(x, k)];
  return out;
}

GeomMap geom_aggregation_map(const prob::Pmf& p, const prob::Pmf& q, const GeomMapOptions& opts) {
  if (!prob::majorizes(p, q)) throw std::invalid_argument("geom_aggregation_map: p is not majorized by q");
  GeomMap g;
  g.source_labels = p.labels();
  g.target_labels = q.labels();
  if (p.exact() && q.exact()) return build<Rational>(p.exact_weights(), q.exact_weights(), opts, std::move(g));
  return build<Real>(p.weights(), q.weights(), opts, std::move(g));
}

namespace {

template <class W>
std::vector<W> pushforward(const std::vector<W>& p, const GeomMap& g, std::size_t l) {
  std::vector<W> prefix(l, W(0)), cycle(l, W(0));
  const std::size_t start = g.period_start ? *g.period_start : g.levels.size();
  for (std::size_t j = 0; j < g.levels.size(); ++j) {
    W scale = half_pow<W>(j + 1);
    auto& dst = j < start ? prefix : cycle;
    for (std::size_t x = 0; x < p.size(); ++x) dst[g.levels[j][x]] += p[x] * scale;
  }
  if (g.period_start) {
    // The cycle repeats every len levels: multiply by 1 / (1 - 2^{-len}).
    std::size_t len = g.levels.size() - start;
    W factor = W(1) / (W(1) - half_pow<W>(len));
    for (std::size_t y = 0; y < l; ++y) prefix[y] += cycle[y] * factor;
  }
  return prefix;
}

}  // namespace

GeomMapCheck verify_geom_map(const prob::Pmf& p, const prob::Pmf& q, const GeomMap& g, Real tol) {
  GeomMapCheck out;
  const std::size_t l = q.size();
  if (g.target_labels != q.labels() || g.source_labels != p.labels()) {
    out.detail = "labels differ from the map";
    return out;
  }
  for (const auto& level : g.levels)
    for (auto y : level)
      if (y >= l) {
        out.detail = "target index out of range";
        return out;
      }
  const std::size_t K = g.levels.size();
  if (g.exact && p.exact() && q.exact()) {
    auto push = pushforward<Rational>(p.exact_weights(), g, l);
    if (!g.period_start) {
      if (g.residual_exact.size() != l) {
        out.detail = "missing residual";
        return out;
      }
      Rational total(0);
      for (const auto& r : g.residual_exact) {
        if (sgn(r) < 0) {
          out.detail = "negative residual";
          return out;
        }
        total += r;
      }
      if (total != 1 || !prob::majorizes<Rational>(std::span<const Rational>(p.exact_weights()),
                                                   std::span<const Rational>(g.residual_exact))) {
        out.detail = "residual cannot be continued";
        return out;
      }
      Rational scale = half_pow<Rational>(K);
      for (std::size_t y = 0; y < l; ++y) push[y] += scale * g.residual_exact[y];
    }
    for (std::size_t y = 0; y < l; ++y)
      if (push[y] != q.exact_weights()[y]) {
        out.detail = "pushforward differs at " + q.labels()[y];
        return out;
      }
    out.ok = true;
    return out;
  }
  auto push = pushforward<Real>(p.weights(), g, l);
  Real err = 0;
  for (std::size_t y = 0; y < l; ++y) err = std::max(err, std::fabs(push[y] - q.weights()[y]));
  out.max_error = err;
  out.ok = err <= tol;
  if (!out.ok) out.detail = "pushforward deviates by " + std::to_string(static_cast<double>(err));
  return out;
}

}  // namespace infodiv::divide
