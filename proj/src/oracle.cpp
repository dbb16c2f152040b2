#include "ptsim/oracle.hpp"

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace ptsim {

const FunctionalTable* Registry::find(std::size_t e) const {
  auto it = functionals.find(e);
  return it == functionals.end() ? nullptr : &it->second;
}

namespace {

bool constraints_match(const std::vector<OracleConstraint>& cs, const Bits& g_side, const Bits& c_side) {
  for (const OracleConstraint& c : cs) {
    bool actual = c.side == OracleSide::G ? g_side.get(c.pos) : c_side.get(c.pos);
    if (actual != c.bit) return false;
  }
  return true;
}

EvalResult eval_table(const FunctionalTable& table, const Bits& g_side, const Bits& c_side,
                      std::size_t n, std::size_t stage) {
  for (const FunctionalEntry& entry : table.entries) {
    if (entry.input != n || entry.settle_stage > stage) continue;
    if (constraints_match(entry.constraints, g_side, c_side)) return entry.output;
  }
  return std::nullopt;
}

}  // namespace

EvalResult eval(const Registry& reg, std::size_t e, const Bits& g_side, const Bits& c_side,
                std::size_t n, std::size_t stage) {
  const FunctionalTable* table = reg.find(e);
  if (table == nullptr) throw std::invalid_argument("eval: unknown functional index");
  return eval_table(*table, g_side, c_side, n, stage);
}

EvalResult eval_lenient(const Registry& reg, std::size_t e, const Bits& g_side,
                        const Bits& c_side, std::size_t n, std::size_t stage) {
  const FunctionalTable* table = reg.find(e);
  if (table == nullptr) return std::nullopt;
  return eval_table(*table, g_side, c_side, n, stage);
}

EvalResult diag(const Registry& reg, std::size_t n, std::size_t stage) {
  auto it = reg.diagonal.find(n);
  if (it == reg.diagonal.end() || it->second.settle_stage > stage) return std::nullopt;
  return it->second.value;
}

namespace {

// Two entries conflict when they are jointly satisfiable (no position
// constrained to opposite bits on the same side) but give different
// outputs for the same input.
bool jointly_satisfiable(const FunctionalEntry& a, const FunctionalEntry& b) {
  for (const OracleConstraint& ca : a.constraints)
    for (const OracleConstraint& cb : b.constraints)
      if (ca.pos == cb.pos && ca.side == cb.side && ca.bit != cb.bit) return false;
  return true;
}

}  // namespace

std::vector<std::string> validate_registry(const Registry& reg, std::size_t universe) {
  std::vector<std::string> out;
  for (const auto& [e, table] : reg.functionals) {
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      for (const OracleConstraint& c : table.entries[i].constraints)
        if (c.pos >= universe)
          out.push_back("functional " + std::to_string(e) + ": constraint position " +
                        std::to_string(c.pos) + " outside universe");
      for (std::size_t j = i + 1; j < table.entries.size(); ++j) {
        const FunctionalEntry& a = table.entries[i];
        const FunctionalEntry& b = table.entries[j];
        if (a.input == b.input && a.output != b.output && jointly_satisfiable(a, b))
          out.push_back("functional " + std::to_string(e) + ": entries " + std::to_string(i) +
                        " and " + std::to_string(j) + " conflict on input " + std::to_string(a.input));
      }
    }
  }
  for (const auto& [n, fact] : reg.diagonal)
    if (fact.settle_stage < 1)
      out.push_back("diagonal fact for " + std::to_string(n) + " settles before stage 1");
  return out;
}

namespace {

std::vector<OracleConstraint> parse_constraints(const std::string& text) {
  std::vector<OracleConstraint> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    char side = 0;
    int bit = 0;
    if (std::sscanf(item.c_str(), "%zu:%c:%d", &pos, &side, &bit) != 3 || (side != 'G' && side != 'C') ||
        (bit != 0 && bit != 1))
      throw std::invalid_argument("registry: bad constraint '" + item + "'");
    out.push_back({pos, side == 'G' ? OracleSide::G : OracleSide::C, bit == 1});
  }
  return out;
}

}  // namespace

Registry parse_registry(std::istream& is, std::size_t universe) {
  Registry reg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "S") {
      ss >> reg.stage_budget;
    } else if (kind == "F") {
      std::size_t e = 0;
      FunctionalEntry entry;
      int output = 0;
      ss >> e >> entry.input >> entry.settle_stage >> output;
      if (ss.fail() || (output != 0 && output != 1))
        throw std::invalid_argument("registry line " + std::to_string(lineno) + ": bad F record");
      entry.output = output == 1;
      std::string rest;
      ss >> rest;
      if (!rest.empty()) entry.constraints = parse_constraints(rest);
      reg.functionals[e].index = e;
      reg.functionals[e].entries.push_back(std::move(entry));
    } else if (kind == "D") {
      std::size_t n = 0;
      int value = 0;
      DiagonalFact fact;
      ss >> n >> value >> fact.settle_stage;
      if (ss.fail() || (value != 0 && value != 1))
        throw std::invalid_argument("registry line " + std::to_string(lineno) + ": bad D record");
      fact.value = value == 1;
      reg.diagonal[n] = fact;
    } else {
      throw std::invalid_argument("registry line " + std::to_string(lineno) + ": unknown record '" + kind + "'");
    }
  }
  auto bad = validate_registry(reg, universe);
  if (!bad.empty()) throw std::invalid_argument("registry rejected: " + bad.front());
  return reg;
}

std::string serialize_registry(const Registry& reg) {
  std::ostringstream os;
  os << "S " << reg.stage_budget << "\n";
  for (const auto& [e, table] : reg.functionals)
    for (const FunctionalEntry& entry : table.entries) {
      os << "F " << e << " " << entry.input << " " << entry.settle_stage << " " << (entry.output ? 1 : 0);
      if (!entry.constraints.empty()) {
        os << " ";
        for (std::size_t i = 0; i < entry.constraints.size(); ++i) {
          const OracleConstraint& c = entry.constraints[i];
          if (i > 0) os << ",";
          os << c.pos << ":" << (c.side == OracleSide::G ? 'G' : 'C') << ":" << (c.bit ? 1 : 0);
        }
      }
      os << "\n";
    }
  for (const auto& [n, fact] : reg.diagonal)
    os << "D " << n << " " << (fact.value ? 1 : 0) << " " << fact.settle_stage << "\n";
  return os.str();
}

}  // namespace ptsim
