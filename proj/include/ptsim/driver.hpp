#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptsim/bits.hpp"
#include "ptsim/condition.hpp"
#include "ptsim/forcing.hpp"
#include "ptsim/oracle.hpp"

namespace ptsim {

struct StageSpec {
  enum class Kind { Qm, R };
  Kind kind = Kind::Qm;
  std::size_t m = 0;  // Qm
  std::size_t e = 0;  // R
  std::size_t i = 0;

  std::string text() const;
};

struct Budgets {
  std::size_t depth = 0;
  std::size_t domain_bound = 0;
  std::size_t threshold = 1;  // acceptability floor; Q_m raises it to m
};

struct Schedule {
  std::vector<StageSpec> stages;
  Budgets budgets;
};

/// Diagonal pairing <e,i> and its inverse.
std::size_t pair_encode(std::size_t e, std::size_t i);
std::pair<std::size_t, std::size_t> pair_decode(std::size_t s);

/// Alternating Q_0, R_<0>, Q_1, R_<1>, ... for `count` stages, with
/// depth/domain-bound defaults derived from the horizon when zero.
Schedule default_schedule(std::size_t count, std::size_t horizon, Budgets budgets);

struct TraceStage {
  StageSpec spec;
  std::string tag;  // Qm | Forced | Unresolved | HypothesisViolated
  Condition after;
  ExtensionWitness witness;        // parts of `after` -> parts of the previous condition
  std::optional<std::size_t> part;  // Qm: the acceptable part extended
  std::vector<ForceRRound> rounds;  // R stages
};

struct Trace {
  GroundSets grounds;
  Schedule schedule;
  Condition initial;
  std::vector<TraceStage> stages;
  std::string status;  // complete | Unresolved | HypothesisViolated
  std::string detail;
  std::map<std::size_t, bool> h;
  std::vector<std::size_t> chain;  // part i_s per stage, filled by extraction
  Bits g;
};

/// Runs the staged construction from the one-part initial condition,
/// verifying every extension as it goes. Postcondition failures are hard
/// errors naming the stage; Unresolved/HypothesisViolated terminate the
/// trace with that status.
Trace run_construction(const GroundSets& grounds, const Registry& reg, const Schedule& schedule);

/// Chooses the chain i_0, i_1, ... through the refinement tree (deepest
/// stem, ties to the smallest index), records it in the trace, and
/// returns the union of stems along it padded to the horizon. On small
/// horizons the satisfaction classes U_s are materialized and checked
/// non-empty and nested.
Bits select_path_and_extract_g(Trace& trace);

struct RequirementReport {
  StageSpec spec;
  bool ok = false;
  std::string witness;
};

std::vector<RequirementReport> verify_requirements(const Bits& g, const GroundSets& grounds,
                                                   const Registry& reg, const Schedule& schedule);

struct CohesiveStage {
  Bits stem_before;
  Bits z;
  bool kept_set = false;  // Z_s = Z_{s-1} n C_s rather than the complement
  std::optional<std::size_t> hit;  // diagonal-hit input, when achieved
};

struct CohesiveResult {
  Bits g;
  std::vector<CohesiveStage> stages;
};

/// Finite-extension cohesive construction: at stage s keep C_s if the
/// remainder stays thick enough, else its complement; always grow the
/// stem inside Z_s, grabbing a diagonal hit for functional s when one is
/// realizable.
CohesiveResult cohesive_construction(const std::vector<Bits>& sets, const GroundSets& grounds,
                                     const Registry& reg);

struct StableColoringTable {
  std::map<std::pair<std::size_t, std::size_t>, int> color;  // (m, n), m > n -> {1, 2}

  int at(std::size_t m, std::size_t n) const;
};

struct StableColoring {
  Bits f1;
  Bits f2;
  std::vector<std::size_t> flagged;  // columns not constant on the tail window
};

/// Finitized limit partition of a stable coloring: n lands in f1 iff its
/// column is colored 1 on the whole top half of the horizon above n.
StableColoring limit_partition(const StableColoringTable& f, std::size_t horizon);

/// Line-delimited JSON trace records: one header, one per stage, one
/// result line.
void write_trace(std::ostream& os, const Trace& trace, const Registry& reg);
Trace read_trace(std::istream& is, Registry& reg);

/// Re-verifies a trace from its records alone: condition shapes,
/// extension witnesses, Q_m forcing, R forcing of completed stages, and
/// the extracted G. Empty result = ok.
std::vector<std::string> check_trace(const Trace& trace, const Registry& reg);

}  // namespace ptsim
