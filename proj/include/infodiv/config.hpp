#pragma once

#include "infodiv/numeric.hpp"

#include <cstddef>

namespace infodiv {

struct RunConfig {
  Real tolerance = 1e-9L;
  Real tail_eps = 1e-12L;
  Real poisson_trunc_eps = 1e-12L;
  int max_depth = 3;
  bool emit_map = false;
  // Atom cap for intermediate convolutions in dominance materializations.
  std::size_t max_atoms = 4096;

  void validate() const;
};

}  // namespace infodiv
