#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ptsim/bits.hpp"
#include "ptsim/ptree.hpp"

namespace ptsim {

/// A tree-forcing condition (k, sigma_0..sigma_{k-1}, P): k stems whose
/// reservoirs range over the paths of the k-part class P.
struct Condition {
  std::size_t parts = 1;
  std::vector<Bits> stems;
  PartitionTree tree;
};

/// Checks the condition shape: one stem per part, P has matching part
/// count, P non-empty at full depth, stems within the horizon.
/// Returns violations (empty = valid).
std::vector<std::string> condition_violations(const Condition& c, std::size_t horizon);

/// The one-part starting condition (1, empty stem, {full-horizon omega}).
Condition initial_condition(const GroundSets& grounds);

}  // namespace ptsim
