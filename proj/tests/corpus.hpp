#pragma once

// Seeded random objects shared by the tests and the acceptance run.

#include "infodiv/pmf.hpp"
#include "infodiv/spectrum.hpp"

#include <random>

namespace corpus {

using infodiv::Rational;
using infodiv::Real;

// Rational pmf with integer weights in [1, max_weight] over a random support.
inline infodiv::prob::Pmf rational_pmf(std::mt19937_64& rng, int min_support, int max_support, long max_weight = 30) {
  std::uniform_int_distribution<int> size(min_support, max_support);
  std::uniform_int_distribution<long> w(1, max_weight);
  int s = size(rng);
  std::vector<long> ints(s);
  long total = 0;
  for (auto& x : ints) total += (x = w(rng));
  std::vector<Rational> ws;
  for (long x : ints) {
    Rational q(x, total);
    q.canonicalize();
    ws.push_back(q);
  }
  return infodiv::prob::Pmf::from_rationals(std::move(ws));
}

inline infodiv::prob::Pmf float_pmf(std::mt19937_64& rng, int min_support, int max_support) {
  std::uniform_int_distribution<int> size(min_support, max_support);
  std::exponential_distribution<double> e(1.0);
  int s = size(rng);
  std::vector<Real> w(s);
  Real total = 0;
  for (auto& x : w) total += (x = e(rng) + 1e-3);
  for (auto& x : w) x /= total;
  return infodiv::prob::Pmf::from_floats(std::move(w));
}

// Step cdf with up to max_atoms atoms on [0, max_t]; about a third of the
// draws put an atom at 0.
inline infodiv::spectrum::StepCdf step_cdf(std::mt19937_64& rng, int max_atoms, Real max_t) {
  std::uniform_int_distribution<int> size(1, max_atoms);
  std::uniform_real_distribution<double> t(0, static_cast<double>(max_t));
  std::exponential_distribution<double> m(1.0);
  int s = size(rng);
  std::vector<infodiv::spectrum::Atom> atoms;
  Real total = 0;
  for (int i = 0; i < s; ++i) {
    Real loc = (i == 0 && rng() % 3 == 0) ? 0 : t(rng);
    Real mass = m(rng) + 1e-3;
    atoms.push_back({loc, mass});
    total += mass;
  }
  for (auto& a : atoms) a.mass /= total;
  return infodiv::spectrum::StepCdf(std::move(atoms));
}

// p majorized by q: q pushed through random T-transforms.
inline infodiv::prob::Pmf t_transformed(std::mt19937_64& rng, const infodiv::prob::Pmf& q, int steps) {
  std::vector<Rational> w = q.exact_weights();
  std::uniform_int_distribution<std::size_t> idx(0, w.size() - 1);
  std::uniform_int_distribution<int> lam(0, 8);
  for (int s = 0; s < steps && w.size() > 1; ++s) {
    std::size_t i = idx(rng), j = idx(rng);
    if (i == j) continue;
    Rational l(lam(rng), 8);
    l.canonicalize();
    Rational a = w[i], b = w[j];
    w[i] = l * a + (1 - l) * b;
    w[j] = (1 - l) * a + l * b;
  }
  return infodiv::prob::Pmf::from_rationals(std::move(w));
}

}  // namespace corpus
