#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ptsim/bits.hpp"
#include "ptsim/condition.hpp"
#include "ptsim/oracle.hpp"
#include "ptsim/ptree.hpp"

namespace ptsim {

/// Finite partial function omega -> 2.
struct Valuation {
  std::map<std::size_t, bool> values;

  bool defined(std::size_t n) const { return values.contains(n); }
  std::string text() const;  // {n:bit,...} with ascending n

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

/// Canonical enumeration order: domain size, then domain, then values.
bool valuation_canonical_less(const Valuation& a, const Valuation& b);

/// p never matches a settled diagonal value.
bool is_correct(const Valuation& p, const Registry& reg);

/// Some n in both domains gets different values.
bool incompatible(const Valuation& p, const Valuation& q);

struct DisagreementWitness {
  Bits y;
  std::size_t input = 0;
};

/// Functional disagreement of Phi_e^{rho (+) C} with p on X through the
/// mask: a Y <= X and n in dom p with
/// eval(e, (Y/rho) ^ mask, C, n, s_max) halting away from p(n).
/// Scans the table for realizable entries rather than enumerating Y.
std::optional<DisagreementWitness> functional_disagrees(const Registry& reg, std::size_t e,
                                                        const Bits& rho, const Bits& x,
                                                        const Valuation& p, const Bits& mask,
                                                        const Bits& c_side);

/// The S_p class of the staged dichotomy lemma, materialized as a
/// 2k-part tree to the given depth: paths Z_0 (+) ... (+) Z_{2k-1} whose
/// pairwise unions form a level-`depth` node of c's class and which no
/// staged computation refutes against p on the unforced parts.
PartitionTree build_sp_tree(const Condition& c, const Valuation& p, std::size_t e, std::size_t i,
                            const Registry& reg, const GroundSets& grounds, std::size_t depth,
                            const std::set<std::size_t>& unforced);

/// Emptiness of S_p at the given depth, computed by depth-first search
/// (agrees with build_sp_tree, without materializing the tree).
bool condition_disagrees(const Condition& c, const Valuation& p, std::size_t e, std::size_t i,
                         const Registry& reg, const GroundSets& grounds, std::size_t depth,
                         const std::set<std::size_t>& unforced);

struct DisagreementEnumeration {
  std::vector<Valuation> discovered;
  std::size_t depth_used = 0;

  bool contains(const Valuation& p) const;
};

/// All valuations with domain inside {0..domain_bound} whose S_p tree is
/// empty at `depth`, in canonical order (the finitized C-c.e. set E).
DisagreementEnumeration enumerate_e(const Condition& c, std::size_t e, std::size_t i,
                                    const Registry& reg, const GroundSets& grounds,
                                    std::size_t depth, std::size_t domain_bound,
                                    const std::set<std::size_t>& unforced);

}  // namespace ptsim
