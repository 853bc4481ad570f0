#pragma once

#include <cstddef>
#include <vector>

#include "tpreg/ppml/fit.hpp"

namespace tpreg::ppml {

struct SeparationResult {
  std::vector<std::size_t> kept;     // design rows, ascending
  std::vector<std::size_t> dropped;  // design rows, ascending
};

/// Repeatedly removes rows that sit in a fixed-effect group whose outcomes
/// are all zero, in any absorbed dimension, until no such group remains.
SeparationResult drop_separated(const Design& design);

}  // namespace tpreg::ppml
