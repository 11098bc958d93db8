#include "corpus.hpp"

#include "infodiv/iidca.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace infodiv;
using prob::Pmf;

namespace {

Real sum(const Pmf& p) {
  Real s = 0;
  for (Real w : p.weights()) s += w;
  return s;
}

}  // namespace

TEST_CASE("iidca examples") {
  auto u = iidca::iidca_greedy(Pmf::from_floats({0.25L, 0.25L, 0.25L, 0.25L}), 2);
  REQUIRE(u.q.size() == 2);
  CHECK(u.q.weights()[0] == doctest::Approx(0.5));
  CHECK(u.q.weights()[1] == doctest::Approx(0.5));
  CHECK(std::fabs(u.lost_information) < 1e-9L);

  auto r = iidca::iidca_greedy(Pmf::from_floats({0.4L, 0.3L, 0.2L, 0.1L}), 2);
  REQUIRE(r.q.size() == 2);
  CHECK(std::fabs(r.q.weights()[0] - std::sqrt(0.4L)) < 1e-6L);
  CHECK(std::fabs(r.q.weights()[1] - (1 - std::sqrt(0.4L))) < 1e-6L);
  CHECK(r.lost_information >= -1e-9L);

  auto pm = iidca::iidca_greedy(Pmf::point_mass(), 3);
  REQUIRE(pm.q.size() == 1);
  CHECK(pm.q.weights()[0] == doctest::Approx(1.0));
}

TEST_CASE("oracle agrees on the examples") {
  for (const auto& p : {Pmf::from_floats({0.25L, 0.25L, 0.25L, 0.25L}), Pmf::from_floats({0.4L, 0.3L, 0.2L, 0.1L})}) {
    auto g = iidca::iidca_greedy(p, 2);
    auto o = iidca::iidca_oracle(p, 2);
    REQUIRE(g.q.size() == o.size());
    for (std::size_t i = 0; i < o.size(); ++i) CHECK(std::fabs(g.q.weights()[i] - o.weights()[i]) < 1e-6L);
  }
  CHECK_THROWS(iidca::iidca_oracle(Pmf::from_floats(std::vector<Real>(7, 1.0L / 7)), 2));
  CHECK_THROWS(iidca::iidca_oracle(Pmf::from_floats({0.5L, 0.5L}), 4));
}

TEST_CASE("property: greedy output is feasible, monotone and normalized") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 60; ++i) {
    auto p = corpus::float_pmf(rng, 1, 6);
    int n = 2 + static_cast<int>(rng() % 2);
    auto r = iidca::iidca_greedy(p, n);
    const auto& q = r.q.weights();
    for (std::size_t j = 0; j + 1 < q.size(); ++j) CHECK(q[j] >= q[j + 1]);
    CHECK(std::fabs(sum(r.q) - 1) < 1e-7L);
    CHECK(prob::power_majorizes(r.q, n, p, 1e-9L));
    // Each accepted step makes at least one more prefix constraint active.
    for (std::size_t s = 1; s < r.per_step_active_constraints.size(); ++s)
      CHECK(r.per_step_active_constraints[s].size() > r.per_step_active_constraints[s - 1].size());
  }
}

TEST_CASE("property: greedy matches the oracle") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 50; ++i) {
    auto p = corpus::float_pmf(rng, 1, 5);
    int n = 2 + static_cast<int>(rng() % 2);
    auto g = iidca::iidca_greedy(p, n);
    auto o = iidca::iidca_oracle(p, n);
    REQUIRE(g.q.size() == o.size());
    for (std::size_t j = 0; j < o.size(); ++j) CHECK(std::fabs(g.q.weights()[j] - o.weights()[j]) < 1e-6L);
  }
}

TEST_CASE("sample ingestion") {
  auto a = iidca::estimate_pmf_from_samples({{"a", 1}});
  CHECK(a.size() == 1);
  CHECK(a.weights()[0] == 1);
  auto b = iidca::estimate_pmf_from_samples({{"a", 3}, {"b", 1}});
  CHECK(b.weights()[*b.index_of("a")] == doctest::Approx(0.75));
  CHECK(b.weights()[*b.index_of("b")] == doctest::Approx(0.25));
  CHECK_THROWS(iidca::estimate_pmf_from_samples({}));

  std::istringstream raw("label\nx\ny\nx\nz\n");
  auto counts = iidca::read_sample_counts(raw);
  CHECK(counts.at("x") == 2);
  CHECK(counts.at("y") == 1);
  CHECK(counts.at("z") == 1);

  std::istringstream tallies("label,count\nx,5\ny,7\n");
  auto c2 = iidca::read_sample_counts(tallies);
  std::ostringstream out;
  for (const auto& [k, v] : c2) out << k << "," << v << "\n";
  std::istringstream again(out.str());
  CHECK(iidca::read_sample_counts(again) == c2);
}
