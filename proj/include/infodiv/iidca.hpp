#pragma once

#include "infodiv/pmf.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace infodiv::iidca {

struct IidcaResult {
  prob::Pmf q;  // descending
  int n = 1;
  // For each accepted q_i, the prefix indices k (1-based, k <= |supp(p_X)|)
  // whose constraint holds with equality.
  std::vector<std::vector<std::size_t>> per_step_active_constraints;
  Real lost_information = 0;  // n H(q) - H(p_X)
};

// q_i is the largest t in [0, q_{i-1}] with (q_1..q_{i-1}, t)^{xn}
// majorized by p_X.
IidcaResult iidca_greedy(const prob::Pmf& p_X, int n, Real tol = 1e-10L);

// Same recursion solved by grid refinement against the fully enumerated
// tensor power. Limited to supports of at most 6 and n <= 3.
prob::Pmf iidca_oracle(const prob::Pmf& p_X, int n);

prob::Pmf estimate_pmf_from_samples(const std::map<std::string, std::uint64_t>& counts);

// One label per row, or "label,count" rows. A header "label[,count]" is skipped.
std::map<std::string, std::uint64_t> read_sample_counts(std::istream& in);

}  // namespace infodiv::iidca
