#pragma once

#include "infodiv/compound_poisson.hpp"
#include "infodiv/config.hpp"
#include "infodiv/pmf.hpp"
#include "infodiv/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace infodiv::sid {

using divide::CompoundPoissonLaw;
using spectrum::StepCdf;

// Block k holds s_k = C(k+r-1, r-1) a b^k atoms of weight (p^r/a)((1-p)/b)^k.
struct SnbParams {
  int r = 1;
  Rational p{1};
  std::uint64_t a = 1;
  std::uint64_t b = 1;

  void validate() const;
  std::uint64_t block_size(std::uint64_t k) const;
  Rational atom_weight(std::uint64_t k) const;
  // P(K = k) for K ~ NegBin(r, p), the total mass of block k.
  Rational block_mass(std::uint64_t k) const;
};

// Blocks 0..K where K is the first index whose remaining tail is at most
// tail_eps. Labels are "k:i". Weights and tail are exact.
prob::Pmf snb_pmf(const SnbParams& params, Real tail_eps = 1e-12L);
std::uint64_t snb_last_block(const SnbParams& params, Real tail_eps);

// Spectrum of SNB(params) as the affine image of NegBin(r, p).
StepCdf snb_spectrum(const SnbParams& params, Real tail_eps = 1e-12L);
// n-th convolution root: the affine image of NegBin(r/n, p) with offset
// divided by n.
StepCdf snb_spectrum_root(const SnbParams& params, int n, Real tail_eps = 1e-12L);

struct SnbIndex {
  std::uint64_t block;
  std::uint64_t pos;
};

struct SnbCombination {
  SnbParams params1;
  SnbParams params2;
  SnbParams result;
  // Injective map of (block k1 position i1, block k2 position i2) into
  // block k1+k2 of the result.
  SnbIndex map(SnbIndex x1, SnbIndex x2) const;
};

SnbCombination snb_combine(const SnbParams& p1, const SnbParams& p2);

struct CombineCheck {
  bool injective = false;
  bool weights_match = false;
  bool covers_blocks = false;  // every output atom of blocks <= max_block is hit
  std::uint64_t pairs = 0;
  bool ok() const { return injective && weights_match && covers_blocks; }
};
CombineCheck verify_snb_combine(const SnbCombination& c, std::uint64_t max_block);

// Labels the product pmf through the map and compares with snb_pmf of the
// result on blocks <= max_block.
prob::Pmf combine_pushforward(const SnbCombination& c, std::uint64_t max_block);

struct RidBound {
  std::string method;  // "theorem1" or "lemma1-recursive"
  Real value = 1;
  CompoundPoissonLaw witness;
  Real dominance_gap = 0;
};

struct PowerHint {
  StepCdf base;
  int m;
};

RidBound r_id_upper(const StepCdf& f, const std::optional<PowerHint>& hint = std::nullopt,
                    const RunConfig& cfg = {});

}  // namespace infodiv::sid
