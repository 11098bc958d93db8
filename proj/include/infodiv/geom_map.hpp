#pragma once

#include "infodiv/pmf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace infodiv::divide {

// Assignment of the atoms (x, k) of p x Geom(1/2), with mass p(x) 2^{-k},
// to the support of q. Level k is levels[k-1][x]. When period_start is set
// the levels from there on repeat forever. Otherwise atoms beyond the stored
// levels are covered by the residual: a pmf R with p majorized by R and
// q = sum_k 2^{-k} r_k + 2^{-K} R, which the same construction can continue.
struct GeomMap {
  std::vector<std::string> source_labels;
  std::vector<std::string> target_labels;
  std::vector<std::vector<std::uint32_t>> levels;
  std::optional<std::size_t> period_start;
  bool exact = false;
  std::vector<Rational> residual_exact;
  std::vector<Real> residual;
  std::size_t greedy_steps = 0;
  std::size_t exhaustive_steps = 0;

  std::uint32_t target_of(std::size_t source, std::uint64_t k) const;
  // Labels "(x,k)" for k <= depth; requires a periodic map or depth <= levels.
  prob::AggregationMap to_aggregation_map(std::uint64_t depth) const;
};

struct GeomMapOptions {
  std::size_t max_levels = 64;       // exact mode
  Real float_residual = 1e-12L;      // float mode stops once 2^{-K} is below this
  std::size_t exhaustive_limit = 6;  // supports up to this size get exhaustive fallback
};

// Requires p majorized by q. Exact when both are exact.
GeomMap geom_aggregation_map(const prob::Pmf& p, const prob::Pmf& q, const GeomMapOptions& opts = {});

struct GeomMapCheck {
  bool ok = false;
  Real max_error = 0;  // float mode: largest pushforward deviation incl. residual
  std::string detail;
};

// Recomputes the pushforward from the stored levels and compares it with q.
GeomMapCheck verify_geom_map(const prob::Pmf& p, const prob::Pmf& q, const GeomMap& g, Real tol = 1e-9L);

}  // namespace infodiv::divide
