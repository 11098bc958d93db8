// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Tolerances are fixed here and never adjusted at run time.

#include "corpus.hpp"

#include "infodiv/divide.hpp"
#include "infodiv/iidca.hpp"
#include "infodiv/sid.hpp"
#include "infodiv/uniform.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace infodiv;
using prob::Pmf;
using spectrum::StepCdf;

namespace {

constexpr Real kRatioTol = 1e-9L;
constexpr Real kRatioTolInf = 1e-6L;
constexpr Real kSandwichTol = 1e-6L;
constexpr Real kFormulaTol = 0.01L;
constexpr Real kProp4Tol = 1e-9L;
constexpr Real kBoosterTol = 1e-9L;
constexpr Real kTheorem4Tol = 1e-6L;
constexpr Real kIidcaOracleTol = 1e-6L;
constexpr Real kIidcaSumTol = 1e-7L;
constexpr Real kSnbRootTol = 1e-8L;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

Real hb(Real x) { return binary_entropy(x); }

// Closed form, evaluated here independently of the library.
Real reference_bound(Real H, Real n, Real factor) {
  Real c = kE / (kE - 1);
  Real r = std::exp2(-1 / n);
  Real add = hb(std::min(std::sqrt(c / kLog2E * H / n), 0.5L)) + hb(r) + 2 * (1 - r);
  return factor * H / n + std::min(2.43L, add);
}

Pmf rat(std::initializer_list<long> nums, long den) {
  std::vector<Rational> w;
  for (long x : nums) {
    Rational q(x, den);
    q.canonicalize();
    w.push_back(q);
  }
  return Pmf::from_rationals(std::move(w));
}

void criterion1(Outcome& o) {
  std::mt19937_64 rng(101);
  int runs = 0;
  Real worst = -1;
  for (int i = 0; i < 200; ++i) {
    Pmf p = i % 2 ? corpus::float_pmf(rng, 1, 32) : corpus::rational_pmf(rng, 1, 32, 1000);
    auto f = spectrum::spectrum_of(p);
    for (int n : {2, 3, 5, 10, 0}) {
      try {
        auto r = n ? divide::dominate_ndiv(f, n) : divide::dominate_infdiv(f);
        Real factor = divide::theorem1_factor(n);
        Real tol = n ? kRatioTol : kRatioTolInf;
        bool dom = n ? spectrum::stoch_dom(r.dominating_cdf, f)
                     : spectrum::stoch_dom(r.dominating_cdf, f, {1e-9L, 1e-9L});
        if (!dom) o.fail("dominance failed");
        if (r.mean_ratio > factor + tol || r.mean_ratio < 1 - tol) o.fail("ratio outside bound");
        worst = std::max(worst, r.mean_ratio - factor);
      } catch (const std::exception& e) {
        o.fail(e.what());
      }
      ++runs;
    }
  }
  o.detail << (o.pass ? "" : "; ") << runs << " constructions, max(ratio - bound) = " << static_cast<double>(worst);
}

void criterion2(Outcome& o) {
  std::mt19937_64 rng(102);
  int certs = 0, exact_maps = 0;
  auto check = [&](const Pmf& p, int n, bool want_map) {
    try {
      auto c = divide::divide_pmf(p, n);
      ++certs;
      Real bound = divide::bound_theorem2(c.H_X, n);
      if (c.H_X / n > c.H_Z1 + c.tail_slack + kSandwichTol) o.fail("lower side of the sandwich");
      if (c.H_Z1 > bound + kSandwichTol + c.tail_slack) o.fail("upper side of the sandwich");
      if (want_map) {
        if (!c.aggregation_map || !c.aggregation_map->exact || !c.verdicts.aggregation) o.fail("no exact aggregation");
        else ++exact_maps;
      }
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
  };
  for (int i = 0; i < 40; ++i) {
    auto p = corpus::rational_pmf(rng, 1, 8);
    for (int n : {2, 3}) check(p, n, true);
  }
  for (int i = 0; i < 20; ++i) {
    auto p = corpus::float_pmf(rng, 1, 16);
    for (int n : {2, 3, 5, 10}) check(p, n, false);
  }
  o.detail << (o.pass ? "" : "; ") << certs << " certificates, " << exact_maps << " exact aggregation chains";
}

void criterion3(Outcome& o) {
  Real b1 = divide::bound_theorem2(100, 2);
  Real r1 = reference_bound(100, 2, divide::theorem1_factor(2));
  if (!(b1 <= 70)) o.fail("bound at H=100, n=2 above 70");
  if (std::fabs(b1 - r1) > kFormulaTol) o.fail("bound differs from formula");

  const long m = 100000;
  const int n = 200000;
  Real ratio = uniform::theorem4_bound(m);
  Real b2 = divide::bound_with_ratio(100.0L * m, n, ratio);
  Real r2 = reference_bound(100.0L * m, n, ratio);
  if (!(b2 <= 56)) o.fail("per-piece bound above 56");
  if (std::fabs(b2 - r2) > kFormulaTol) o.fail("per-piece bound differs from formula");
  auto sched = uniform::theorem4_schedule(m);
  if (sched.guaranteed_ratio > ratio + 1e-12L) o.fail("schedule ratio above 1+4.71 sqrt(log m / m)");
  o.detail << (o.pass ? "" : "; ") << "H=100,n=2: " << static_cast<double>(b1) << "; H(Y)=100,m=1e5,n=2e5: "
           << static_cast<double>(b2) << " (ratio " << static_cast<double>(ratio) << ", schedule "
           << static_cast<double>(sched.guaranteed_ratio) << ")";
}

void criterion4(Outcome& o) {
  Real worst = 0;
  for (int n = 2; n <= 1000; ++n) {
    auto h = divide::booster_pmf(n).entropy(1e-12L);
    Real r = std::exp2(-1.0L / n);
    if (!(h.upper < 1.43L)) o.fail("H(B) >= 1.43 at n=" + std::to_string(n));
    if (h.upper > hb(r) + 2 * (1 - r) + kBoosterTol) o.fail("H(B) above H_b bound at n=" + std::to_string(n));
    worst = std::max(worst, h.upper);
  }
  o.detail << (o.pass ? "" : "; ") << "max H(B) upper estimate " << static_cast<double>(worst);
}

void criterion5(Outcome& o) {
  std::mt19937_64 rng(105);
  for (int i = 0; i < 200; ++i) {
    auto f = corpus::step_cdf(rng, 16, 10);
    try {
      auto x = spectrum::discretize(f);
      Real e = spectrum::mean(f), h = prob::entropy(x);
      if (e > h + kProp4Tol) o.fail("E(F) > H(X)");
      if (h > e + hb(std::min(std::sqrt(e / kLog2E), 0.5L)) + kProp4Tol) o.fail("H(X) above the upper bound");
      if (!spectrum::info_majorized(spectrum::spectrum_of(x.without_zeros()), f, kProp4Tol)) o.fail("not majorized");
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
  }
  o.detail << (o.pass ? "" : "; ") << "200 step cdfs";
}

void criterion6(Outcome& o) {
  std::mt19937_64 rng(106);
  int both = 0, neither = 0, means = 0, closures = 0;
  for (int i = 0; i < 500; ++i) {
    auto q = corpus::rational_pmf(rng, 1, 8);
    auto p = i % 2 ? corpus::t_transformed(rng, q, 3) : corpus::rational_pmf(rng, 1, 8);
    auto fp = spectrum::spectrum_of(p), fq = spectrum::spectrum_of(q);
    bool m = prob::majorizes(p, q), im = spectrum::info_majorized(fp, fq);
    if (m != im) o.fail("majorization and informational majorization disagree");
    (m ? both : neither) += 1;
    if (im) {
      ++means;
      if (spectrum::mean(fp) < spectrum::mean(fq) - 1e-12L) o.fail("mean not anti-monotone");
    }
  }
  for (int i = 0; i < 200; ++i) {
    auto q1 = corpus::rational_pmf(rng, 1, 6), q2 = corpus::rational_pmf(rng, 1, 6);
    auto f1 = spectrum::spectrum_of(corpus::t_transformed(rng, q1, 3)), f2 = spectrum::spectrum_of(q1);
    auto f3 = spectrum::spectrum_of(corpus::t_transformed(rng, q2, 3)), f4 = spectrum::spectrum_of(q2);
    if (!spectrum::info_majorized(spectrum::convolve(f1, f3), spectrum::convolve(f2, f4))) o.fail("convolution");
    for (Real l : {0.0L, 0.3L, 1.0L})
      if (!spectrum::info_majorized(spectrum::mix(f1, f3, l), spectrum::mix(f2, f4, l))) o.fail("mixture");
    ++closures;
  }
  o.detail << (o.pass ? "" : "; ") << "500 pairs (" << both << " majorized, " << neither << " not), " << means
           << " mean checks, " << closures << " closure quadruples";
}

void criterion7(Outcome& o) {
  std::vector<std::pair<std::string, StepCdf>> bases{
      {"(1/2,1/4,1/4)", spectrum::spectrum_of(rat({2, 1, 1}, 4))},
      {"(0.7,0.2,0.1)", spectrum::spectrum_of(Pmf::from_floats({0.7L, 0.2L, 0.1L}))},
      {"(1/3,1/3,1/6,1/6)", spectrum::spectrum_of(rat({2, 2, 1, 1}, 6))},
  };
  std::ostringstream ratios;
  for (const auto& [name, base] : bases) {
    ratios << " " << name << ":";
    for (int m : {4, 16, 64, 256}) {
      try {
        auto r = uniform::theorem4_construct(base, m, 3);
        Real cap = std::max(kE / (kE - 1), uniform::theorem4_bound(m));
        if (r.achieved_ratio > cap + kTheorem4Tol) o.fail("ratio above bound");
        if (r.dominance_gap > 1e-9L) o.fail("dominance gap");
        ratios << " " << static_cast<double>(r.achieved_ratio);
      } catch (const std::exception& e) {
        o.fail(e.what());
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << "ratios" << ratios.str();
}

void criterion8(Outcome& o) {
  int cells = 0;
  for (Real gamma : {1.1L, 1.5L, 2.0L, 3.0L, 4.0L})
    for (int n : {5, 20, 100, 200}) {
      int a = static_cast<int>(std::ceil(n / (gamma * gamma) - 1e-12L));
      auto r = uniform::bin_poi_report(gamma, n, a);
      if (!r.hypothesis) o.fail("hypothesis not met");
      if (!r.dominated) {
        std::ostringstream os;
        os << "not dominated at gamma=" << static_cast<double>(gamma) << " n=" << n << " a=" << a
           << " (violation " << static_cast<double>(r.max_violation) << ")";
        o.fail(os.str());
      }
      ++cells;
    }
  o.detail << (o.pass ? "" : "; ") << cells << " grid cells";
}

void criterion9(Outcome& o) {
  std::mt19937_64 rng(109);
  Real worst = 0, worst_sum = 0;
  auto sum_of = [](const Pmf& q) {
    Real s = 0;
    for (Real w : q.weights()) s += w;
    return s;
  };
  for (int i = 0; i < 50; ++i) {
    auto p = corpus::float_pmf(rng, 1, 5);
    int n = 2 + i % 2;
    try {
      auto g = iidca::iidca_greedy(p, n);
      auto oracle = iidca::iidca_oracle(p, n);
      worst_sum = std::max(worst_sum, std::fabs(sum_of(g.q) - 1));
      if (g.q.size() != oracle.size()) {
        o.fail("support sizes differ");
        continue;
      }
      for (std::size_t j = 0; j < oracle.size(); ++j)
        worst = std::max(worst, std::fabs(g.q.weights()[j] - oracle.weights()[j]));
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
  }
  if (worst > kIidcaOracleTol) o.fail("greedy and oracle differ");
  if (worst_sum > kIidcaSumTol) o.fail("sum of q off 1");
  auto ex = iidca::iidca_greedy(Pmf::from_floats({0.4L, 0.3L, 0.2L, 0.1L}), 2);
  if (ex.q.size() != 2 || std::fabs(ex.q.weights()[0] - std::sqrt(0.4L)) > kIidcaOracleTol ||
      std::fabs(ex.q.weights()[1] - (1 - std::sqrt(0.4L))) > kIidcaOracleTol)
    o.fail("worked example");
  o.detail << (o.pass ? "" : "; ") << "max |greedy - oracle| " << static_cast<double>(worst) << ", max |sum q - 1| "
           << static_cast<double>(worst_sum);
}

sid::SnbParams snb(int r, Rational p, std::uint64_t a, std::uint64_t b) {
  sid::SnbParams s;
  s.r = r;
  s.p = p;
  s.a = a;
  s.b = b;
  return s;
}

void criterion10(Outcome& o) {
  for (std::uint64_t a : {1u, 2u, 5u, 12u}) {
    auto u = sid::snb_pmf(snb(1, 1, a, 1));
    bool ok = u.size() == a && u.exact_tail() == 0;
    for (const auto& w : u.exact_weights()) ok = ok && w == Rational(1, a);
    if (!ok) o.fail("SNB(1,1,a,1) is not uniform");
  }
  for (Rational p : {Rational(1, 2), Rational(1, 5), Rational(7, 8)}) {
    auto g = sid::snb_pmf(snb(1, p, 1, 1), 1e-12L);
    Rational w = p;
    for (std::size_t k = 0; k < g.size(); ++k, w *= (1 - p))
      if (g.exact_weights()[k] != w) o.fail("SNB(1,p,1,1) is not geometric");
  }
  Real worst = 0;
  for (auto params : {snb(1, Rational(1, 2), 1, 1), snb(2, Rational(1, 3), 3, 2), snb(3, Rational(3, 4), 2, 5)}) {
    auto f = sid::snb_spectrum(params);
    for (int n : {2, 3, 5})
      worst = std::max(worst, spectrum::uniform_metric(spectrum::power_convolve(sid::snb_spectrum_root(params, n), n), f));
  }
  if (worst > kSnbRootTol) o.fail("n-divisibility");
  std::uint64_t pairs = 0;
  for (auto [a, b] : {std::pair{snb(1, Rational(1, 2), 1, 1), snb(1, Rational(1, 2), 1, 1)},
                      std::pair{snb(2, Rational(1, 3), 2, 2), snb(1, Rational(1, 3), 3, 2)}}) {
    auto c = sid::snb_combine(a, b);
    auto check = sid::verify_snb_combine(c, 8);
    if (!check.ok()) o.fail("combine pushforward");
    pairs += check.pairs;
  }
  o.detail << (o.pass ? "" : "; ") << "max d_U " << static_cast<double>(worst) << ", " << pairs << " combine pairs";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"Theorem 1 dominance and mean ratio", criterion1},
      {"division certificate entropy sandwich", criterion2},
      {"worked bound examples", criterion3},
      {"booster entropy", criterion4},
      {"discretization sandwich", criterion5},
      {"majorization property suites", criterion6},
      {"uniform construction at desk scale", criterion7},
      {"binomial/Poisson dominance grid", criterion8},
      {"IIDCA greedy vs oracle", criterion9},
      {"SNB identities", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.fail(e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
