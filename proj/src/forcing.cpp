#include "ptsim/forcing.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ptsim {

namespace {

// X/sigma with X padded by zeros when the stem is longer than the path.
Bits stem_reservoir(const Bits& x, const Bits& sigma) {
  Bits padded = x;
  while (padded.size() < sigma.size()) padded.push_back(false);
  return overwrite(padded, sigma);
}

std::vector<Bits> path_parts(const Bits& code, std::size_t parts) {
  return deinterleave(code, parts);
}

}  // namespace

bool mathias_extends(const MathiasCondition& d, const MathiasCondition& c) {
  if (!is_prefix(c.stem, d.stem)) return false;
  return subset_leq(stem_reservoir(d.reservoir, d.stem), stem_reservoir(c.reservoir, c.stem));
}

ExtensionWitness identity_witness(std::size_t parts) {
  ExtensionWitness f(parts);
  std::iota(f.begin(), f.end(), 0);
  return f;
}

bool extends(const Condition& d, const Condition& c, const ExtensionWitness& f) {
  if (f.size() != d.parts || d.stems.size() != d.parts || c.stems.size() != c.parts) return false;
  for (std::size_t m : f)
    if (m >= c.parts) return false;
  PathSet dp = paths_at_depth(d.tree, d.tree.depth);
  PathSet cp = paths_at_depth(c.tree, c.tree.depth);
  if (dp.codes.empty() || cp.codes.empty()) return false;
  for (const Bits& ycode : dp.codes) {
    std::vector<Bits> y = path_parts(ycode, d.parts);
    bool witnessed = false;
    for (const Bits& xcode : cp.codes) {
      std::vector<Bits> x = path_parts(xcode, c.parts);
      bool all = true;
      for (std::size_t j = 0; j < d.parts && all; ++j)
        all = mathias_extends({d.stems[j], y[j]}, {c.stems[f[j]], x[f[j]]});
      if (all) {
        witnessed = true;
        break;
      }
    }
    if (!witnessed) return false;
  }
  return true;
}

bool satisfies_on_part(const Bits& g, const Condition& c, std::size_t part) {
  if (part >= c.parts) throw std::out_of_range("satisfies_on_part: part out of range");
  const Bits& sigma = c.stems[part];
  if (!is_prefix(sigma, g)) return false;
  for (const Bits& code : paths_at_depth(c.tree, c.tree.depth).codes) {
    Bits xj = path_parts(code, c.parts)[part];
    if (subset_leq(g, stem_reservoir(xj, sigma))) return true;
  }
  return false;
}

std::optional<std::size_t> satisfies(const Bits& g, const Condition& c) {
  for (std::size_t j = 0; j < c.parts; ++j)
    if (satisfies_on_part(g, c, j)) return j;
  return std::nullopt;
}

bool forces_qm(const Condition& c, std::size_t part, const GroundSets& grounds, std::size_t m) {
  if (part >= c.parts) throw std::out_of_range("forces_qm: part out of range");
  const Bits& sigma = c.stems[part];
  return restrict_to(sigma, grounds.a).count() >= m &&
         restrict_to(sigma, grounds.a_bar()).count() >= m;
}

std::string RequirementWitness::text() const {
  std::ostringstream os;
  os << (side == SideTag::A ? "A" : "Abar") << ":" << input << ":" << (hit ? "hit" : "divergent");
  return os.str();
}

std::optional<RequirementWitness> r_requirement_witness(const Bits& g, std::size_t e, std::size_t i,
                                                        const Registry& reg,
                                                        const GroundSets& grounds) {
  Bits ga = restrict_to(g, grounds.a);
  Bits gabar = restrict_to(g, grounds.a_bar());
  for (std::size_t n = 0; n <= grounds.universe; ++n) {
    for (int side = 0; side < 2; ++side) {
      std::size_t idx = side == 0 ? e : i;
      const Bits& gs = side == 0 ? ga : gabar;
      auto tag = side == 0 ? RequirementWitness::SideTag::A : RequirementWitness::SideTag::ABar;
      EvalResult r = eval_lenient(reg, idx, gs, grounds.c, n, reg.stage_budget);
      if (!r.has_value()) return RequirementWitness{tag, n, false};
      EvalResult dv = diag(reg, n, reg.stage_budget);
      if (dv.has_value() && *r == *dv) return RequirementWitness{tag, n, true};
    }
  }
  return std::nullopt;
}

bool forces_r_at_horizon(const Condition& c, std::size_t part, std::size_t e, std::size_t i,
                         const Registry& reg, const GroundSets& grounds) {
  if (part >= c.parts) throw std::out_of_range("forces_r_at_horizon: part out of range");
  const Bits& sigma = c.stems[part];
  // Only positions some table entry reads on the G side can influence the
  // requirement, so it suffices to sweep assignments of those.
  std::set<std::size_t> relevant;
  for (std::size_t idx : {e, i})
    if (const FunctionalTable* table = reg.find(idx))
      for (const FunctionalEntry& entry : table->entries)
        for (const OracleConstraint& oc : entry.constraints)
          if (oc.side == OracleSide::G) relevant.insert(oc.pos);
  std::set<Bits> seen;
  for (const Bits& code : paths_at_depth(c.tree, c.tree.depth).codes) {
    Bits xj = path_parts(code, c.parts)[part];
    if (!seen.insert(xj).second) continue;
    std::vector<std::size_t> free;
    for (std::size_t pos : relevant)
      if (pos >= sigma.size() && pos < grounds.universe && xj.get(pos)) free.push_back(pos);
    if (free.size() > 26)
      throw std::runtime_error("forces_r_at_horizon: too many free oracle positions");
    for (unsigned long assign = 0; assign < (1ul << free.size()); ++assign) {
      Bits g = Bits::zeros(grounds.universe);
      for (std::size_t p = 0; p < sigma.size() && p < grounds.universe; ++p)
        g.set(p, sigma.at(p));
      for (std::size_t t = 0; t < free.size(); ++t) g.set(free[t], (assign >> t) & 1u);
      if (!r_requirement_witness(g, e, i, reg, grounds).has_value()) return false;
    }
  }
  return true;
}

std::set<std::size_t> unforced_parts(const Condition& c, std::size_t e, std::size_t i,
                                     const Registry& reg, const GroundSets& grounds) {
  std::set<std::size_t> u;
  for (std::size_t j = 0; j < c.parts; ++j)
    if (!forces_r_at_horizon(c, j, e, i, reg, grounds)) u.insert(j);
  return u;
}

std::set<std::size_t> acceptable_parts(const Condition& c, const GroundSets& grounds,
                                       std::size_t t) {
  std::set<std::size_t> out;
  Bits abar = grounds.a_bar();
  for (const Bits& code : paths_at_depth(c.tree, c.tree.depth).codes) {
    std::vector<Bits> x = path_parts(code, c.parts);
    for (std::size_t j = 0; j < c.parts; ++j)
      if (restrict_to(x[j], grounds.a).count() >= t && restrict_to(x[j], abar).count() >= t)
        out.insert(j);
  }
  return out;
}

std::optional<std::pair<std::size_t, Bits>> find_acceptable_part(const Condition& c,
                                                                 const GroundSets& grounds,
                                                                 std::size_t t) {
  Bits abar = grounds.a_bar();
  std::size_t depth = c.tree.depth;
  Bits cur;  // current node, level = |cur| / parts
  std::vector<std::size_t> counts(c.parts, 0);
  std::size_t level = 0;
  while (level < depth) {
    // shallowest descendant giving some part a new element of A and of
    // the complement; ties to the smallest part, then the least node
    bool advanced = false;
    for (std::size_t lvl = level + 1; lvl <= depth && !advanced; ++lvl) {
      for (std::size_t j = 0; j < c.parts && !advanced; ++j) {
        for (const Bits& node : c.tree.nodes) {
          if (node.size() != c.parts * lvl || !is_prefix(cur, node)) continue;
          Bits part = path_parts(node, c.parts)[j];
          bool got_a = false, got_abar = false;
          for (std::size_t pos = level; pos < lvl; ++pos) {
            if (!part.at(pos)) continue;
            if (grounds.a.get(pos)) got_a = true;
            if (abar.get(pos)) got_abar = true;
          }
          if (got_a && got_abar) {
            ++counts[j];
            cur = node;
            level = lvl;
            advanced = true;
            break;
          }
        }
      }
    }
    if (!advanced) break;  // the greedy construction stalled
  }
  if (level < depth) {
    for (const Bits& node : c.tree.nodes)
      if (node.size() == c.parts * depth && is_prefix(cur, node)) {
        cur = node;
        break;
      }
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < c.parts; ++j)
    if (counts[j] > counts[best]) best = j;
  if (cur.size() != c.parts * depth) return std::nullopt;
  Bits part = path_parts(cur, c.parts)[best];
  if (restrict_to(part, grounds.a).count() < t || restrict_to(part, abar).count() < t)
    return std::nullopt;
  return std::make_pair(best, cur);
}

Condition force_qm_extension(const Condition& c, std::size_t part, const GroundSets& grounds,
                             std::size_t m) {
  if (part >= c.parts) throw std::out_of_range("force_qm_extension: part out of range");
  const Bits& sigma = c.stems[part];
  Bits abar = grounds.a_bar();
  std::optional<Bits> tau;
  for (const Bits& code : paths_at_depth(c.tree, c.tree.depth).codes) {
    Bits base = stem_reservoir(path_parts(code, c.parts)[part], sigma);
    for (std::size_t len = sigma.size(); len <= base.size(); ++len) {
      Bits cand = base.prefix(len);
      if (restrict_to(cand, grounds.a).count() < m || restrict_to(cand, abar).count() < m)
        continue;
      if (!tau.has_value() || cand.size() < tau->size() ||
          (cand.size() == tau->size() && cand < *tau))
        tau = cand;
      break;
    }
  }
  if (!tau.has_value()) {
    std::ostringstream os;
    os << "force_qm_extension: no stem forcing Q_" << m << " on part " << part;
    throw std::runtime_error(os.str());
  }
  Condition d = c;
  d.stems[part] = *tau;
  d.tree = refine_below(c.tree, part, *tau, RefineMode::Prefix, sigma);
  return d;
}

std::optional<bool> compute_a_from_c(const PartitionTree& t, const std::set<std::size_t>& s_a,
                                     const std::set<std::size_t>& s_abar, std::size_t n,
                                     std::size_t depth) {
  std::size_t d = std::min(depth, t.depth);
  for (std::size_t level = n + 1; level <= d; ++level) {
    bool any_a = false, any_abar = false;
    std::vector<Bits> nodes = nodes_at_level(t, level);
    if (nodes.empty()) throw std::runtime_error("compute_a_from_c: tree empty at level");
    for (const Bits& node : nodes) {
      std::vector<Bits> parts = path_parts(node, t.parts);
      for (std::size_t j : s_a)
        if (parts.at(j).at(n)) any_a = true;
      for (std::size_t j : s_abar)
        if (parts.at(j).at(n)) any_abar = true;
    }
    if (!any_a && !any_abar)
      throw std::runtime_error("compute_a_from_c: both candidate lists empty");
    if (any_a != any_abar) return any_a;
  }
  return std::nullopt;
}

CaseIResult case_i_extension(const Condition& c, const Valuation& p,
                             const std::set<std::size_t>& unforced, std::size_t e, std::size_t i,
                             const Registry& reg, const GroundSets& grounds) {
  Bits abar = grounds.a_bar();
  for (std::size_t j : unforced) {
    const Bits& sigma = c.stems[j];
    for (const auto& [n, pv] : p.values) {
      EvalResult dv = diag(reg, n, reg.stage_budget);
      if (!dv.has_value()) continue;  // a hit needs a settled diagonal value
      for (int side = 0; side < 2; ++side) {
        const FunctionalTable* table = reg.find(side == 0 ? e : i);
        if (table == nullptr) continue;
        const Bits& mask = side == 0 ? grounds.a : abar;
        for (const FunctionalEntry& entry : table->entries) {
          if (entry.input != n || entry.output != *dv) continue;
          if (entry.settle_stage > reg.stage_budget) continue;
          bool ok = true;
          std::vector<std::size_t> need_one;
          std::size_t maxpos = 0;
          bool pinned = false;
          for (const OracleConstraint& oc : entry.constraints) {
            if (oc.side == OracleSide::C) {
              if (grounds.c.get(oc.pos) != oc.bit) ok = false;
            } else if (oc.pos < sigma.size()) {
              if ((sigma.at(oc.pos) && mask.get(oc.pos)) != oc.bit) ok = false;
            } else if (oc.bit) {
              if (!mask.get(oc.pos) || oc.pos >= grounds.universe)
                ok = false;
              else
                need_one.push_back(oc.pos);
              maxpos = std::max(maxpos, oc.pos);
              pinned = true;
            } else if (mask.get(oc.pos)) {
              maxpos = std::max(maxpos, oc.pos);  // pin a 0 into the stem
              pinned = true;
            }
            if (!ok) break;
          }
          if (!ok) continue;
          std::size_t len = pinned ? std::max(sigma.size(), maxpos + 1) : sigma.size();
          Bits tau = sigma;
          while (tau.size() < len) tau.push_back(false);
          for (std::size_t pos : need_one) tau.set(pos, true);
          PartitionTree q = refine_below(c.tree, j, tau, RefineMode::Subset, sigma);
          if (q.empty()) continue;
          Condition d = c;
          d.stems[j] = tau;
          d.tree = q;
          return CaseIResult{std::move(d), j, n, tau};
        }
      }
    }
  }
  throw std::runtime_error("case_i_extension: no diagonal-hit witness (case misclassified)");
}

CaseIIResult case_ii_extension(const Condition& c, const std::vector<Valuation>& ps,
                               const std::set<std::size_t>& unforced, std::size_t e, std::size_t i,
                               const Registry& reg, const GroundSets& grounds, std::size_t depth) {
  std::size_t k = c.parts;
  if (ps.size() != 2 * k + 1)
    throw std::invalid_argument("case_ii_extension: expected 2k+1 valuations");
  std::vector<PartitionTree> trees;
  for (const Valuation& p : ps) {
    PartitionTree s = build_sp_tree(c, p, e, i, reg, grounds, depth, unforced);
    if (s.empty()) throw std::runtime_error("case_ii_extension: empty S_p (case misclassified)");
    trees.push_back(std::move(s));
  }
  PartitionTree q = cross_trees(trees);
  std::size_t pairs = (ps.size() * (ps.size() - 1)) / 2;
  Condition d;
  d.parts = q.parts;
  d.tree = std::move(q);
  ExtensionWitness f;
  for (std::size_t j = 0; j < 2 * k; ++j)
    for (std::size_t pq = 0; pq < pairs; ++pq) {
      d.stems.push_back(c.stems[j / 2]);
      f.push_back(j / 2);
    }
  return CaseIIResult{std::move(d), std::move(f)};
}

namespace {

// "either Phi_n(n) halts or some p in E puts F + {n} in its domain and
// contradicts the diagonal everywhere else" -- the body of the set S.
bool s_clause_holds(const std::vector<std::size_t>& f, std::size_t n,
                    const DisagreementEnumeration& en, const Registry& reg,
                    const Valuation** found = nullptr) {
  if (diag(reg, n, reg.stage_budget).has_value()) return true;
  for (const Valuation& p : en.discovered) {
    if (!p.defined(n)) continue;
    bool covers = true;
    for (std::size_t nl : f)
      if (!p.defined(nl)) covers = false;
    if (!covers) continue;
    bool outside_ok = true;
    for (const auto& [m, v] : p.values) {
      if (m == n || std::find(f.begin(), f.end(), m) != f.end()) continue;
      EvalResult dm = diag(reg, m, reg.stage_budget);
      if (!dm.has_value() || *dm == v) outside_ok = false;
    }
    if (outside_ok) {
      if (found != nullptr) *found = &p;
      return true;
    }
  }
  return false;
}

}  // namespace

SearchOutcome dichotomy_search(const Condition& c, const std::set<std::size_t>& unforced,
                               std::size_t e, std::size_t i, const Registry& reg,
                               const GroundSets& grounds, std::size_t depth,
                               std::size_t domain_bound) {
  SearchOutcome out;
  out.enumerated = enumerate_e(c, e, i, reg, grounds, depth, domain_bound, unforced);
  for (const Valuation& p : out.enumerated.discovered)
    if (is_correct(p, reg)) {
      out.kind = SearchOutcome::Kind::CaseI;
      out.case_i_valuation = p;
      out.detail = "correct valuation in E";
      return out;
    }
  std::size_t need = 2 * c.parts + 1;
  std::vector<std::size_t>& f = out.witnesses;
  while (true) {
    if (f.size() < 64 && (1ull << f.size()) >= need) {
      std::vector<std::size_t> dom = f;
      std::sort(dom.begin(), dom.end());
      for (unsigned long v = 0; out.case_ii_valuations.size() < need; ++v) {
        Valuation p;
        for (std::size_t t = 0; t < dom.size(); ++t)
          p.values[dom[t]] = (v >> (dom.size() - 1 - t)) & 1u;
        out.case_ii_valuations.push_back(std::move(p));
      }
      out.kind = SearchOutcome::Kind::CaseII;
      out.detail = "witness domain reached 2k+1 incompatible valuations";
      return out;
    }
    std::optional<std::size_t> witness;
    for (std::size_t n = 0; n <= domain_bound && !witness.has_value(); ++n) {
      if (std::find(f.begin(), f.end(), n) != f.end()) continue;
      if (!s_clause_holds(f, n, out.enumerated, reg)) witness = n;
    }
    if (witness.has_value()) {
      f.push_back(*witness);
      continue;
    }
    // F is in S. Genuinely so if candidates remain: build the
    // diagonal-avoiding h the hypothesis on C forbids.
    bool vacuous = true;
    for (std::size_t n = 0; n <= domain_bound; ++n)
      if (std::find(f.begin(), f.end(), n) == f.end()) vacuous = false;
    if (vacuous) {
      out.kind = SearchOutcome::Kind::Unresolved;
      out.detail = "witness candidates exhausted at domain bound";
      return out;
    }
    for (std::size_t nl : f) out.h[nl] = false;
    for (std::size_t n = 0; n <= domain_bound; ++n) {
      if (out.h.contains(n)) continue;
      EvalResult dn = diag(reg, n, reg.stage_budget);
      if (dn.has_value()) {
        out.h[n] = !*dn;
        continue;
      }
      const Valuation* p = nullptr;
      s_clause_holds(f, n, out.enumerated, reg, &p);
      if (p == nullptr) throw std::logic_error("dichotomy_search: lost S membership witness");
      out.h[n] = !p->values.at(n);
    }
    out.kind = SearchOutcome::Kind::HypothesisViolated;
    out.detail = f.empty() ? "empty set landed in S" : "witness chain landed in S";
    return out;
  }
}

ForceRResult force_r_extension(const Condition& c, std::size_t e, std::size_t i,
                               const Registry& reg, const GroundSets& grounds, std::size_t depth,
                               std::size_t domain_bound) {
  ForceRResult res;
  res.cond = c;
  std::size_t cap = std::max<std::size_t>(c.parts, 1);
  for (std::size_t round = 0;; ++round) {
    std::set<std::size_t> u = unforced_parts(res.cond, e, i, reg, grounds);
    if (u.empty()) {
      res.status = ForceRResult::Status::Forced;
      return res;
    }
    if (round >= cap) {
      res.status = ForceRResult::Status::Unresolved;
      res.detail = "round cap reached with parts still unforced";
      return res;
    }
    SearchOutcome out = dichotomy_search(res.cond, u, e, i, reg, grounds, depth, domain_bound);
    switch (out.kind) {
      case SearchOutcome::Kind::CaseI: {
        CaseIResult step = case_i_extension(res.cond, out.case_i_valuation, u, e, i, reg, grounds);
        res.rounds.push_back(ForceRRound{"CaseI", step.cond, identity_witness(res.cond.parts),
                                         {out.case_i_valuation}, step.part});
        res.cond = step.cond;
        break;
      }
      case SearchOutcome::Kind::CaseII: {
        CaseIIResult step =
            case_ii_extension(res.cond, out.case_ii_valuations, u, e, i, reg, grounds, depth);
        res.rounds.push_back(
            ForceRRound{"CaseII", step.cond, step.witness, out.case_ii_valuations, std::nullopt});
        res.cond = step.cond;
        break;
      }
      case SearchOutcome::Kind::Unresolved:
        res.status = ForceRResult::Status::Unresolved;
        res.detail = out.detail;
        return res;
      case SearchOutcome::Kind::HypothesisViolated:
        res.status = ForceRResult::Status::HypothesisViolated;
        res.h = out.h;
        res.detail = out.detail;
        return res;
    }
  }
}

}  // namespace ptsim
