#include "infodiv/config.hpp"

#include <stdexcept>

namespace infodiv {

void RunConfig::validate() const {
  if (!(tolerance > 0) || !(tail_eps > 0) || !(poisson_trunc_eps > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (max_depth < 0) throw std::invalid_argument("max depth must be nonnegative");
  if (max_atoms < 16) throw std::invalid_argument("max atoms must be at least 16");
}

}  // namespace infodiv
