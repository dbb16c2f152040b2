#include "ptsim/valuation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ptsim {

std::string Valuation::text() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [n, v] : values) {
    if (!first) os << ",";
    os << n << ":" << (v ? 1 : 0);
    first = false;
  }
  os << "}";
  return os.str();
}

bool valuation_canonical_less(const Valuation& a, const Valuation& b) {
  if (a.values.size() != b.values.size()) return a.values.size() < b.values.size();
  auto dom = [](const Valuation& v) {
    std::vector<std::size_t> d;
    for (const auto& [n, bit] : v.values) d.push_back(n);
    return d;
  };
  auto da = dom(a), db = dom(b);
  if (da != db) return da < db;
  std::vector<bool> va, vb;
  for (const auto& [n, bit] : a.values) va.push_back(bit);
  for (const auto& [n, bit] : b.values) vb.push_back(bit);
  return va < vb;
}

bool is_correct(const Valuation& p, const Registry& reg) {
  for (const auto& [n, v] : p.values) {
    EvalResult d = diag(reg, n, reg.stage_budget);
    if (d.has_value() && *d == v) return false;
  }
  return true;
}

bool incompatible(const Valuation& p, const Valuation& q) {
  for (const auto& [n, v] : p.values) {
    auto it = q.values.find(n);
    if (it != q.values.end() && it->second != v) return true;
  }
  return false;
}

std::optional<DisagreementWitness> functional_disagrees(const Registry& reg, std::size_t e,
                                                        const Bits& rho, const Bits& x,
                                                        const Valuation& p, const Bits& mask,
                                                        const Bits& c_side) {
  if (rho.size() > x.size()) throw std::invalid_argument("functional_disagrees: |rho| > |X|");
  const FunctionalTable* table = reg.find(e);
  if (table == nullptr) return std::nullopt;
  for (const FunctionalEntry& entry : table->entries) {
    auto it = p.values.find(entry.input);
    if (it == p.values.end() || entry.output == it->second) continue;
    if (entry.settle_stage > reg.stage_budget) continue;
    // The oracle string is (Y/rho) ^ mask with Y <= X free beyond |rho|.
    bool ok = true;
    std::vector<std::size_t> needed_ones;
    for (const OracleConstraint& c : entry.constraints) {
      if (c.side == OracleSide::C) {
        if (c_side.get(c.pos) != c.bit) ok = false;
      } else if (c.pos < rho.size()) {
        if ((rho.at(c.pos) && mask.get(c.pos)) != c.bit) ok = false;
      } else if (c.bit) {
        if (x.get(c.pos) && mask.get(c.pos))
          needed_ones.push_back(c.pos);
        else
          ok = false;
      }
      if (!ok) break;
    }
    if (!ok) continue;
    Bits y = Bits::zeros(x.size());
    for (std::size_t pos : needed_ones) y.set(pos, true);
    return DisagreementWitness{y, entry.input};
  }
  return std::nullopt;
}

namespace {

struct SpContext {
  const Condition& c;
  const Valuation& p;
  const Registry& reg;
  const GroundSets& grounds;
  const std::set<std::size_t>& unforced;
  std::size_t e = 0;
  std::size_t i = 0;
  std::vector<Bits> base_a;     // sigma_j^A per part
  std::vector<Bits> base_abar;  // sigma_j^Abar per part
};

SpContext make_sp_context(const Condition& c, const Valuation& p, std::size_t e, std::size_t i,
                          const Registry& reg, const GroundSets& grounds,
                          const std::set<std::size_t>& unforced) {
  SpContext ctx{c, p, reg, grounds, unforced, e, i, {}, {}};
  Bits abar = grounds.a_bar();
  for (const Bits& stem : c.stems) {
    ctx.base_a.push_back(restrict_to(stem, grounds.a));
    ctx.base_abar.push_back(restrict_to(stem, abar));
  }
  return ctx;
}

// Realizability of one refuting entry against split part `zpart` at the
// given level: some mu with |mu| <= level makes every constraint match
// on ((mu ^ zpart)/base) (+) C.
bool entry_refutes(const FunctionalEntry& entry, const Bits& base, const Bits& zpart,
                   std::size_t level, const Bits& c_side) {
  for (const OracleConstraint& c : entry.constraints) {
    if (c.side == OracleSide::C) {
      if (c_side.get(c.pos) != c.bit) return false;
    } else if (c.pos < base.size()) {
      if (base.at(c.pos) != c.bit) return false;
    } else if (c.bit) {
      if (!(c.pos < level && zpart.get(c.pos))) return false;
    }
  }
  return true;
}

bool sp_node_refuted(const SpContext& ctx, const std::vector<Bits>& zparts, std::size_t level) {
  std::size_t stage = std::min(level, ctx.reg.stage_budget);
  for (std::size_t j : ctx.unforced) {
    for (int side = 0; side < 2; ++side) {
      const FunctionalTable* table = ctx.reg.find(side == 0 ? ctx.e : ctx.i);
      if (table == nullptr) continue;
      const Bits& base = side == 0 ? ctx.base_a[j] : ctx.base_abar[j];
      const Bits& zpart = zparts[2 * j + static_cast<std::size_t>(side)];
      for (const FunctionalEntry& entry : table->entries) {
        auto it = ctx.p.values.find(entry.input);
        if (it == ctx.p.values.end() || entry.output == it->second) continue;
        if (entry.settle_stage > stage) continue;
        if (entry_refutes(entry, base, zpart, level, ctx.grounds.c)) return true;
      }
    }
  }
  return false;
}

// Enumerates the surviving children of a split node: extend the union
// path along c's tree, split the new position among each covering part's
// two halves, drop refuted children.
template <typename Fn>
void for_each_sp_child(const SpContext& ctx, const std::vector<Bits>& zparts, const Bits& ucode,
                       std::size_t level, Fn&& fn) {
  std::size_t k = ctx.c.parts;
  for (unsigned long pat = 1; pat < (1ul << k); ++pat) {
    Bits child_u = ucode;
    for (std::size_t j = 0; j < k; ++j) child_u.push_back((pat >> j) & 1u);
    if (!ctx.c.tree.nodes.contains(child_u)) continue;
    // per covering part: (z_{2j}, z_{2j+1}) in {01, 10, 11}
    std::vector<std::size_t> split(k, 0);
    while (true) {
      std::vector<Bits> child = zparts;
      for (std::size_t j = 0; j < k; ++j) {
        bool in_part = (pat >> j) & 1u;
        static const bool lo[3] = {false, true, true};
        static const bool hi[3] = {true, false, true};
        child[2 * j].push_back(in_part && lo[split[j]]);
        child[2 * j + 1].push_back(in_part && hi[split[j]]);
      }
      if (!sp_node_refuted(ctx, child, level + 1)) fn(child, child_u);
      // odometer over covering parts only
      std::size_t j = 0;
      for (; j < k; ++j) {
        if (!((pat >> j) & 1u)) continue;
        if (++split[j] < 3) break;
        split[j] = 0;
      }
      if (j == k) break;
    }
  }
}

bool sp_dfs(const SpContext& ctx, const std::vector<Bits>& zparts, const Bits& ucode,
            std::size_t level, std::size_t depth) {
  if (level == depth) return true;
  bool found = false;
  for_each_sp_child(ctx, zparts, ucode, level,
                    [&](const std::vector<Bits>& child, const Bits& child_u) {
                      if (!found) found = sp_dfs(ctx, child, child_u, level + 1, depth);
                    });
  return found;
}

}  // namespace

PartitionTree build_sp_tree(const Condition& c, const Valuation& p, std::size_t e, std::size_t i,
                            const Registry& reg, const GroundSets& grounds, std::size_t depth,
                            const std::set<std::size_t>& unforced) {
  std::size_t d = std::min(depth, c.tree.depth);
  SpContext ctx = make_sp_context(c, p, e, i, reg, grounds, unforced);
  PartitionTree out{2 * c.parts, d, {}};
  if (!c.tree.nodes.contains(Bits())) return out;

  struct Node {
    std::vector<Bits> zparts;
    Bits ucode;
  };
  std::vector<Node> level{{std::vector<Bits>(2 * c.parts), Bits()}};
  std::set<Bits> paths;
  for (std::size_t lvl = 0; lvl < d; ++lvl) {
    std::vector<Node> next;
    for (const Node& node : level)
      for_each_sp_child(ctx, node.zparts, node.ucode, lvl,
                        [&](const std::vector<Bits>& child, const Bits& child_u) {
                          next.push_back({child, child_u});
                        });
    level = std::move(next);
  }
  for (const Node& node : level) paths.insert(interleave(node.zparts));
  return tree_from_paths(2 * c.parts, d, paths);
}

bool condition_disagrees(const Condition& c, const Valuation& p, std::size_t e, std::size_t i,
                         const Registry& reg, const GroundSets& grounds, std::size_t depth,
                         const std::set<std::size_t>& unforced) {
  std::size_t d = std::min(depth, c.tree.depth);
  if (!c.tree.nodes.contains(Bits())) return true;
  SpContext ctx = make_sp_context(c, p, e, i, reg, grounds, unforced);
  return !sp_dfs(ctx, std::vector<Bits>(2 * c.parts), Bits(), 0, d);
}

bool DisagreementEnumeration::contains(const Valuation& p) const {
  return std::find(discovered.begin(), discovered.end(), p) != discovered.end();
}

DisagreementEnumeration enumerate_e(const Condition& c, std::size_t e, std::size_t i,
                                    const Registry& reg, const GroundSets& grounds,
                                    std::size_t depth, std::size_t domain_bound,
                                    const std::set<std::size_t>& unforced) {
  DisagreementEnumeration out;
  out.depth_used = depth;
  std::vector<std::vector<std::size_t>> domains;
  std::size_t count = domain_bound + 1;
  for (unsigned long mask = 0; mask < (1ul << count); ++mask) {
    std::vector<std::size_t> dom;
    for (std::size_t n = 0; n < count; ++n)
      if ((mask >> n) & 1u) dom.push_back(n);
    domains.push_back(std::move(dom));
  }
  std::sort(domains.begin(), domains.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& dom : domains) {
    std::vector<bool> vals(dom.size(), false);
    while (true) {
      Valuation p;
      for (std::size_t t = 0; t < dom.size(); ++t) p.values[dom[t]] = vals[t];
      if (condition_disagrees(c, p, e, i, reg, grounds, depth, unforced))
        out.discovered.push_back(p);
      // binary counting, first domain element most significant
      std::size_t t = dom.size();
      bool overflow = false;
      while (true) {
        if (t == 0) {
          overflow = true;
          break;
        }
        --t;
        if (!vals[t]) {
          vals[t] = true;
          break;
        }
        vals[t] = false;
      }
      if (overflow) break;
    }
  }
  return out;
}

}  // namespace ptsim
