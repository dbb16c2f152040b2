#include "ptsim/condition.hpp"

namespace ptsim {

std::vector<std::string> condition_violations(const Condition& c, std::size_t horizon) {
  std::vector<std::string> out;
  if (c.parts == 0) out.push_back("condition with zero parts");
  if (c.stems.size() != c.parts) out.push_back("stem count differs from part count");
  if (c.tree.parts != c.parts) out.push_back("tree part count differs from condition");
  for (const Bits& stem : c.stems)
    if (stem.size() > horizon) out.push_back("stem longer than horizon: " + stem.text());
  auto tree_bad = tree_violations(c.tree);
  out.insert(out.end(), tree_bad.begin(), tree_bad.end());
  if (tree_bad.empty() && !nonempty_at_depth(c.tree, c.tree.depth))
    out.push_back("tree empty at full depth");
  return out;
}

Condition initial_condition(const GroundSets& grounds) {
  grounds.check();
  return Condition{1, {Bits()}, single_path_tree(1, Bits::ones(grounds.universe))};
}

}  // namespace ptsim
