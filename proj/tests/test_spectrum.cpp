#include "corpus.hpp"

#include "infodiv/kernels.hpp"
#include "infodiv/spectrum.hpp"

#include <doctest.h>

#include <cmath>

using namespace infodiv;
using prob::Pmf;
using spectrum::StepCdf;

namespace {

StepCdf atom(Real t) { return StepCdf::point(t); }

StepCdf two(Real t1, Real m1, Real t2, Real m2) { return StepCdf({{t1, m1}, {t2, m2}}); }

Pmf p124() { return Pmf::from_rationals({Rational(1, 2), Rational(1, 4), Rational(1, 4)}); }

Real hb(Real x) { return binary_entropy(x); }

}  // namespace

TEST_CASE("spectrum_of examples") {
  auto u = spectrum::spectrum_of(Pmf::from_floats({0.25L, 0.25L, 0.25L, 0.25L}));
  REQUIRE(u.size() == 1);
  CHECK(u.atoms()[0].t == doctest::Approx(2.0));
  CHECK(u.atoms()[0].mass == doctest::Approx(1.0));

  auto f = spectrum::spectrum_of(p124());
  REQUIRE(f.size() == 2);
  CHECK(f.atoms()[0].t == doctest::Approx(1.0));
  CHECK(f.atoms()[0].mass == doctest::Approx(0.5));
  CHECK(f.atoms()[1].t == doctest::Approx(2.0));
  CHECK(f.atoms()[1].mass == doctest::Approx(0.5));

  auto pm = spectrum::spectrum_of(Pmf::point_mass());
  CHECK(pm.size() == 1);
  CHECK(pm.atoms()[0].t == 0);

  CHECK_THROWS(spectrum::spectrum_of(Pmf::from_floats({0.5L, 0.5L, 0.0L})));
}

TEST_CASE("big_g examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::big_g(f, 0.5L) == doctest::Approx(1.0));
  CHECK(spectrum::big_g(f, 0.75L) == doctest::Approx(2.0));
  CHECK(spectrum::big_g(f, 1.0L) == doctest::Approx(3.0));
  CHECK(spectrum::big_g(atom(0), 0.37L) == doctest::Approx(0.37));
  CHECK_THROWS(spectrum::big_g(f, 1.5L));
  CHECK_THROWS(spectrum::big_g(f, -0.1L));

  std::mt19937_64 rng(21);
  for (int i = 0; i < 30; ++i) {
    auto p = corpus::float_pmf(rng, 1, 10);
    CHECK(spectrum::big_g(spectrum::spectrum_of(p), 1) == doctest::Approx(static_cast<double>(p.size())));
  }
}

TEST_CASE("inv_cdf examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::inv_cdf(f, 0.3L) == doctest::Approx(1.0));
  CHECK(spectrum::inv_cdf(f, 0.75L) == doctest::Approx(2.0));
  CHECK(spectrum::inv_cdf(f, 0.5L) == doctest::Approx(1.0));
  CHECK(spectrum::inv_cdf(atom(5), 0.9L) == 5);
  CHECK(spectrum::inv_cdf(f, 0) == doctest::Approx(1.0));
}

TEST_CASE("mean examples") {
  CHECK(spectrum::mean(spectrum::spectrum_of(p124())) == doctest::Approx(1.5));
  CHECK(spectrum::mean(atom(0)) == 0);
  CHECK(spectrum::mean(two(1, 0.5L, 3, 0.5L)) == doctest::Approx(2.0));
}

TEST_CASE("convolution examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::uniform_metric(spectrum::convolve(f, atom(0)), f) < 1e-15L);
  auto half = Pmf::from_floats({0.5L, 0.5L});
  for (const auto& q : {half, p124()}) {
    auto lhs = spectrum::convolve(f, spectrum::spectrum_of(q));
    auto rhs = spectrum::spectrum_of(prob::product(p124(), q));
    CHECK(spectrum::uniform_metric(lhs, rhs) < 1e-12L);
  }
  auto a3 = spectrum::power_convolve(atom(1), 3);
  REQUIRE(a3.size() == 1);
  CHECK(a3.atoms()[0].t == doctest::Approx(3.0));
}

TEST_CASE("parallel convolution matches the serial reference") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    auto a = corpus::step_cdf(rng, 200, 10), b = corpus::step_cdf(rng, 200, 10);
    auto s = kernels::convolve_serial(a.atoms(), b.atoms());
    auto p = kernels::convolve_parallel(a.atoms(), b.atoms());
    REQUIRE(s.size() == p.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(s[j].t == doctest::Approx(static_cast<double>(p[j].t)).epsilon(1e-15));
      CHECK(s[j].mass == doctest::Approx(static_cast<double>(p[j].mass)).epsilon(1e-12));
    }
  }
}

TEST_CASE("binned and snapped convolutions match their references") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    auto a = corpus::step_cdf(rng, 150, 10), b = corpus::step_cdf(rng, 150, 10);
    for (auto r : {kernels::Rounding::down, kernels::Rounding::up}) {
      auto s = kernels::convolve_binned_serial(a.atoms(), b.atoms(), 64, r);
      auto p = kernels::convolve_binned_parallel(a.atoms(), b.atoms(), 64, r);
      REQUIRE(s.size() == p.size());
      for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(s[j].t == p[j].t);
        CHECK(s[j].mass == doctest::Approx(static_cast<double>(p[j].mass)).epsilon(1e-12));
      }
      StepCdf exact(kernels::convolve_serial(a.atoms(), b.atoms()));
      StepCdf binned(s);
      // Down-binned cdfs sit above the exact one, up-binned below.
      if (r == kernels::Rounding::down) CHECK(spectrum::stoch_dom(exact, binned));
      else CHECK(spectrum::stoch_dom(binned, exact));
    }
    auto grid = corpus::step_cdf(rng, 40, 20).locations();
    auto ref = kernels::snap_down(kernels::convolve_serial(a.atoms(), b.atoms()), grid, 0, 1e-12L);
    auto snapped = kernels::convolve_snapped(a.atoms(), b.atoms(), grid, 0, 1e-12L);
    StepCdf fr(ref), fs(snapped);
    CHECK(spectrum::uniform_metric(fr, fs) < 1e-12L);
  }
}

TEST_CASE("stoch_dom examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::stoch_dom(f, f));
  CHECK(spectrum::stoch_dom(atom(2), atom(1)));
  CHECK_FALSE(spectrum::stoch_dom(atom(1), atom(2)));
  auto u4 = spectrum::spectrum_of(Pmf::from_floats({0.25L, 0.25L, 0.25L, 0.25L}));
  CHECK(spectrum::stoch_dom(u4, f));
}

TEST_CASE("info_majorized examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::info_majorized(f, f));
  std::mt19937_64 rng(24);
  for (int i = 0; i < 100; ++i) {
    auto g = corpus::step_cdf(rng, 8, 5);
    // Shifting right gives a stochastically larger cdf.
    auto h = g.shifted(static_cast<Real>(rng() % 100) / 50);
    REQUIRE(spectrum::stoch_dom(h, g));
    CHECK(spectrum::info_majorized(h, g));
  }
}

TEST_CASE("discretize examples") {
  auto p = Pmf::from_floats({0.5L, 0.3L, 0.15L, 0.05L});
  auto d = spectrum::discretize(spectrum::spectrum_of(p));
  REQUIRE(d.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d.weights()[i] == doctest::Approx(static_cast<double>(p.weights()[i])));

  auto u3 = spectrum::discretize(atom(std::log2(3.0L)));
  REQUIRE(u3.size() == 3);
  for (Real w : u3.weights()) CHECK(w == doctest::Approx(1.0 / 3));

  auto h = spectrum::discretize(atom(0.5L));
  REQUIRE(h.size() == 2);
  CHECK(h.weights()[0] == doctest::Approx(0.70711).epsilon(1e-5));
  CHECK(h.weights()[1] == doctest::Approx(0.29289).epsilon(1e-4));
  Real H = prob::entropy(h);
  CHECK(H == doctest::Approx(0.87243).epsilon(1e-5));
  CHECK(H <= 0.5L + hb(std::min(std::sqrt(0.5L / kLog2E), 0.5L)) + 1e-12L);

  CHECK(spectrum::discretize(atom(0)).size() == 1);
}

TEST_CASE("uniform_metric examples") {
  auto f = spectrum::spectrum_of(p124());
  CHECK(spectrum::uniform_metric(f, f) == 0);
  CHECK(spectrum::uniform_metric(atom(1), atom(2)) == doctest::Approx(1.0));
  CHECK(spectrum::uniform_metric(two(1, 0.5L, 2, 0.5L), two(2, 0.5L, 3, 0.5L)) == doctest::Approx(0.5));
}

TEST_CASE("mix") {
  auto m = spectrum::mix(atom(1), atom(3), 0.5L);
  CHECK(spectrum::mean(m) == doctest::Approx(2.0));
  CHECK_THROWS(spectrum::mix(atom(1), atom(3), 1.5L));
}

TEST_CASE("property: Prop 1 majorization equivalence") {
  std::mt19937_64 rng(25);
  int agree_true = 0, agree_false = 0;
  for (int i = 0; i < 300; ++i) {
    auto q = corpus::rational_pmf(rng, 1, 8);
    auto p = (i % 2 == 0) ? corpus::t_transformed(rng, q, 3) : corpus::rational_pmf(rng, 1, 8);
    bool m = prob::majorizes(p, q);
    bool im = spectrum::info_majorized(spectrum::spectrum_of(p), spectrum::spectrum_of(q));
    CHECK(m == im);
    (m ? agree_true : agree_false) += (m == im);
  }
  CHECK(agree_true > 50);
  CHECK(agree_false > 50);
}

TEST_CASE("property: Prop 2 mean is anti-monotone") {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 200; ++i) {
    auto q = corpus::rational_pmf(rng, 1, 8);
    auto p = corpus::t_transformed(rng, q, 3);
    auto fp = spectrum::spectrum_of(p), fq = spectrum::spectrum_of(q);
    REQUIRE(spectrum::info_majorized(fp, fq));
    CHECK(spectrum::mean(fp) >= spectrum::mean(fq) - 1e-12L);
  }
}

TEST_CASE("property: Prop 3 convolution and mixture") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 100; ++i) {
    auto q1 = corpus::rational_pmf(rng, 1, 6), q2 = corpus::rational_pmf(rng, 1, 6);
    auto f1 = spectrum::spectrum_of(corpus::t_transformed(rng, q1, 3)), f2 = spectrum::spectrum_of(q1);
    auto f3 = spectrum::spectrum_of(corpus::t_transformed(rng, q2, 3)), f4 = spectrum::spectrum_of(q2);
    CHECK(spectrum::info_majorized(spectrum::convolve(f1, f3), spectrum::convolve(f2, f4)));
    for (Real l : {0.0L, 0.3L, 1.0L}) CHECK(spectrum::info_majorized(spectrum::mix(f1, f3, l), spectrum::mix(f2, f4, l)));
  }
}

TEST_CASE("property: inverse cdf is the log of the left slope of G") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    auto f = corpus::step_cdf(rng, 10, 6);
    auto g = spectrum::g_curve(f);
    for (int j = 0; j < 100; ++j) {
      Real gamma = u(rng);
      if (gamma <= 0) continue;
      bool breakpoint = false;
      for (const auto& b : g.breakpoints()) breakpoint = breakpoint || std::fabs(b.first - gamma) < 1e-12L;
      if (breakpoint) continue;
      CHECK(spectrum::inv_cdf(f, gamma) == doctest::Approx(static_cast<double>(std::log2(g.left_slope(gamma)))));
    }
  }
}

TEST_CASE("property: G curves are convex, increasing and above the diagonal") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    auto g = spectrum::g_curve(corpus::step_cdf(rng, 12, 6));
    const auto& s = g.slopes();
    for (std::size_t j = 0; j + 1 < s.size(); ++j) CHECK(s[j] <= s[j + 1]);
    for (Real x : s) CHECK(x >= 1);
    Real prev = -1;
    for (const auto& b : g.breakpoints()) {
      CHECK(b.second > prev);
      CHECK(b.second >= b.first - 1e-15L);
      prev = b.second;
    }
  }
}

TEST_CASE("property: Prop 4 discretization sandwich") {
  std::mt19937_64 rng(30);
  for (int i = 0; i < 200; ++i) {
    auto f = corpus::step_cdf(rng, 12, 8);
    auto x = spectrum::discretize(f);
    Real e = spectrum::mean(f), h = prob::entropy(x);
    CHECK(e <= h + 1e-9L);
    CHECK(h <= e + hb(std::min(std::sqrt(e / kLog2E), 0.5L)) + 1e-9L);
    CHECK(spectrum::info_majorized(spectrum::spectrum_of(x.without_zeros()), f, 1e-9L));
  }
}
