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
#include "ptsim/valuation.hpp"

namespace ptsim {

struct MathiasCondition {
  Bits stem;
  Bits reservoir;  // |stem| <= |reservoir|
};

/// (tau, Y) extends (sigma, X): sigma is an initial segment of tau and
/// Y/tau <= X/sigma set-wise.
bool mathias_extends(const MathiasCondition& d, const MathiasCondition& c);

/// Maps each part of the finer condition to the part it refines.
using ExtensionWitness = std::vector<std::size_t>;

ExtensionWitness identity_witness(std::size_t parts);

/// d extends c via f: every full-depth path of d's class projects to a
/// single full-depth path of c's class extending it Mathias-wise on
/// every part.
bool extends(const Condition& d, const Condition& c, const ExtensionWitness& f);

/// Smallest part on which G satisfies the condition, if any.
std::optional<std::size_t> satisfies(const Bits& g, const Condition& c);
bool satisfies_on_part(const Bits& g, const Condition& c, std::size_t part);

/// Q_m on a part: the stem meets both A and its complement at least m times.
bool forces_qm(const Condition& c, std::size_t part, const GroundSets& grounds, std::size_t m);

/// Which disjunct of R_{e,i} a set G realizes at the horizon, if any:
/// a diagonal hit or a divergence on either side.
struct RequirementWitness {
  enum class SideTag { A, ABar };
  SideTag side = SideTag::A;
  std::size_t input = 0;
  bool hit = false;  // false = divergence witness

  std::string text() const;
};
std::optional<RequirementWitness> r_requirement_witness(const Bits& g, std::size_t e, std::size_t i,
                                                        const Registry& reg, const GroundSets& grounds);

/// Every full-horizon G satisfying c on the part meets requirement
/// R_{e,i} at the horizon. Decided by sweeping only the oracle positions
/// the registry can read.
bool forces_r_at_horizon(const Condition& c, std::size_t part, std::size_t e, std::size_t i,
                         const Registry& reg, const GroundSets& grounds);

/// U(c) for the requirement R_{e,i}.
std::set<std::size_t> unforced_parts(const Condition& c, std::size_t e, std::size_t i,
                                     const Registry& reg, const GroundSets& grounds);

/// Parts whose reservoir, along some path, meets A and its complement at
/// least t times ("both infinite", finitized).
std::set<std::size_t> acceptable_parts(const Condition& c, const GroundSets& grounds, std::size_t t);

/// Greedy string-building search for an acceptable part: repeatedly adds
/// an element of A and of the complement to some part along paths of the
/// class, and returns the part that recurred most with its assembled path.
std::optional<std::pair<std::size_t, Bits>> find_acceptable_part(const Condition& c,
                                                                 const GroundSets& grounds,
                                                                 std::size_t t);

/// Extend the stem of an acceptable part to force Q_m on it; identity
/// witness. Throws if no qualifying stem exists at the horizon.
Condition force_qm_extension(const Condition& c, std::size_t part, const GroundSets& grounds,
                             std::size_t m);

/// The C-computation of membership in A from the claim of the
/// acceptable-part lemma: prune the level-j candidate lists L_A / L_ABar
/// of a classified tree until one empties. nullopt = undetermined at
/// this depth. Throws if both lists empty (the tree was empty).
std::optional<bool> compute_a_from_c(const PartitionTree& t, const std::set<std::size_t>& s_a,
                                     const std::set<std::size_t>& s_abar, std::size_t n,
                                     std::size_t depth);

struct CaseIResult {
  Condition cond;
  std::size_t part = 0;
  std::size_t input = 0;
  Bits tau;
};

/// Case i: c disagrees with the correct valuation p. Finds a diagonal
/// hit witness and pins it into the stem of one unforced part
/// (subset-mode refinement, identity witness). Throws if no witness
/// exists (the case was misclassified).
CaseIResult case_i_extension(const Condition& c, const Valuation& p,
                             const std::set<std::size_t>& unforced, std::size_t e, std::size_t i,
                             const Registry& reg, const GroundSets& grounds);

struct CaseIIResult {
  Condition cond;
  ExtensionWitness witness;
};

/// Case ii: cross the 2k+1 non-empty S_p classes into a
/// 2k*C(2k+1,2)-part condition that forces R_{e,i} everywhere.
/// Throws if some S_p is empty at the depth.
CaseIIResult case_ii_extension(const Condition& c, const std::vector<Valuation>& ps,
                               const std::set<std::size_t>& unforced, std::size_t e, std::size_t i,
                               const Registry& reg, const GroundSets& grounds, std::size_t depth);

struct SearchOutcome {
  enum class Kind { CaseI, CaseII, Unresolved, HypothesisViolated };
  Kind kind = Kind::Unresolved;
  Valuation case_i_valuation;               // CaseI
  std::vector<Valuation> case_ii_valuations;  // CaseII: 2k+1 pairwise incompatible
  std::map<std::size_t, bool> h;            // HypothesisViolated: diagonal-avoiding map
  std::vector<std::size_t> witnesses;       // the n_0, n_1, ... found
  DisagreementEnumeration enumerated;       // the E used by the search
  std::string detail;
};

/// The finitized dichotomy search of the alternative lemma. Branches
/// that are impossible for genuine oracles are reachable for finite
/// stand-ins and surface as HypothesisViolated; exhausted budgets
/// surface as Unresolved.
SearchOutcome dichotomy_search(const Condition& c, const std::set<std::size_t>& unforced,
                               std::size_t e, std::size_t i, const Registry& reg,
                               const GroundSets& grounds, std::size_t depth,
                               std::size_t domain_bound);

struct ForceRRound {
  std::string tag;  // CaseI | CaseII
  Condition after;
  ExtensionWitness witness;
  std::vector<Valuation> valuations;
  std::optional<std::size_t> part;
};

struct ForceRResult {
  enum class Status { Forced, Unresolved, HypothesisViolated };
  Status status = Status::Forced;
  Condition cond;
  std::vector<ForceRRound> rounds;
  std::map<std::size_t, bool> h;
  std::string detail;
};

/// Iterate dichotomy + case extensions until U empties (round cap =
/// the part count at entry).
ForceRResult force_r_extension(const Condition& c, std::size_t e, std::size_t i,
                               const Registry& reg, const GroundSets& grounds, std::size_t depth,
                               std::size_t domain_bound);

}  // namespace ptsim
