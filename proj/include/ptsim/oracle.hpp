#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptsim/bits.hpp"

namespace ptsim {

enum class OracleSide { G, C };

/// One halting behavior of a functional: on input `input`, once stage
/// `settle_stage` is reached and every constrained oracle bit matches,
/// the functional outputs `output`.
struct OracleConstraint {
  std::size_t pos = 0;
  OracleSide side = OracleSide::G;
  bool bit = false;

  friend bool operator==(const OracleConstraint&, const OracleConstraint&) = default;
};

struct FunctionalEntry {
  std::size_t input = 0;
  std::vector<OracleConstraint> constraints;
  std::size_t settle_stage = 1;
  bool output = false;
};

/// Finite, use-monotone stand-in for a {0,1}-valued oracle functional.
struct FunctionalTable {
  std::size_t index = 0;
  std::vector<FunctionalEntry> entries;
};

struct DiagonalFact {
  bool value = false;
  std::size_t settle_stage = 1;
};

struct Registry {
  std::map<std::size_t, FunctionalTable> functionals;
  std::map<std::size_t, DiagonalFact> diagonal;
  std::size_t stage_budget = 0;  // s_max

  const FunctionalTable* find(std::size_t e) const;
};

/// Halt(bit) as engaged optional, DivergentSoFar as nullopt.
using EvalResult = std::optional<bool>;

/// Finitized application of functional e to the joined oracle
/// g_side (+) c_side at the given stage. Throws on an unknown index.
EvalResult eval(const Registry& reg, std::size_t e, const Bits& g_side, const Bits& c_side,
                std::size_t n, std::size_t stage);

/// Same, but an unregistered index behaves as the empty table.
EvalResult eval_lenient(const Registry& reg, std::size_t e, const Bits& g_side,
                        const Bits& c_side, std::size_t n, std::size_t stage);

/// The diagonal value Phi_n(n) at the given stage.
EvalResult diag(const Registry& reg, std::size_t n, std::size_t stage);

/// Determinism and range diagnostics; empty result means ok.
std::vector<std::string> validate_registry(const Registry& reg, std::size_t universe);

/// Line-oriented text format:
///   S <s_max>
///   F <e> <n> <settle> <output> [pos:side:bit,...]
///   D <n> <value> <settle>
/// Rejects files that fail validate_registry.
Registry parse_registry(std::istream& is, std::size_t universe);
std::string serialize_registry(const Registry& reg);

}  // namespace ptsim
