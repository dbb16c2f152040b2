#include "ptsim/driver.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ptsim {

using nlohmann::json;

std::string StageSpec::text() const {
  std::ostringstream os;
  if (kind == Kind::Qm)
    os << "Q" << m;
  else
    os << "R(" << e << "," << i << ")";
  return os.str();
}

std::size_t pair_encode(std::size_t e, std::size_t i) {
  std::size_t w = e + i;
  return w * (w + 1) / 2 + i;
}

std::pair<std::size_t, std::size_t> pair_decode(std::size_t s) {
  std::size_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= s) ++w;
  std::size_t i = s - w * (w + 1) / 2;
  return {w - i, i};
}

Schedule default_schedule(std::size_t count, std::size_t horizon, Budgets budgets) {
  if (budgets.depth == 0) budgets.depth = horizon;
  if (budgets.domain_bound == 0) budgets.domain_bound = 2;
  Schedule sched;
  sched.budgets = budgets;
  std::size_t next_m = 0, next_r = 0;
  for (std::size_t s = 0; s < count; ++s) {
    StageSpec spec;
    if (s % 2 == 0) {
      spec.kind = StageSpec::Kind::Qm;
      spec.m = next_m++;
    } else {
      spec.kind = StageSpec::Kind::R;
      std::tie(spec.e, spec.i) = pair_decode(next_r++);
    }
    sched.stages.push_back(spec);
  }
  return sched;
}

namespace {

[[noreturn]] void stage_error(std::size_t index, const std::string& what) {
  std::ostringstream os;
  os << "stage " << index << ": " << what;
  throw std::runtime_error(os.str());
}

ExtensionWitness compose(const ExtensionWitness& outer, const ExtensionWitness& inner) {
  // inner maps newest parts into outer's domain
  ExtensionWitness f;
  for (std::size_t m : inner) f.push_back(outer.at(m));
  return f;
}

}  // namespace

Trace run_construction(const GroundSets& grounds, const Registry& reg, const Schedule& schedule) {
  grounds.check();
  Trace tr;
  tr.grounds = grounds;
  tr.schedule = schedule;
  tr.initial = initial_condition(grounds);
  tr.status = "complete";
  Condition cur = tr.initial;
  const Budgets& b = schedule.budgets;
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const StageSpec& spec = schedule.stages[s];
    if (spec.kind == StageSpec::Kind::Qm) {
      std::size_t t = std::max(spec.m, b.threshold);
      std::optional<std::size_t> part;
      if (auto found = find_acceptable_part(cur, grounds, t))
        part = found->first;
      else if (auto parts = acceptable_parts(cur, grounds, t); !parts.empty())
        part = *parts.begin();
      if (!part.has_value()) stage_error(s, "no acceptable part for " + spec.text());
      Condition d = force_qm_extension(cur, *part, grounds, spec.m);
      if (!extends(d, cur, identity_witness(d.parts)))
        stage_error(s, "Q_m extension not verified");
      if (!forces_qm(d, *part, grounds, spec.m)) stage_error(s, "Q_m not forced after extension");
      tr.stages.push_back(TraceStage{spec, "Qm", d, identity_witness(d.parts), part, {}});
      cur = std::move(d);
    } else {
      ForceRResult res =
          force_r_extension(cur, spec.e, spec.i, reg, grounds, b.depth, b.domain_bound);
      ExtensionWitness w = identity_witness(cur.parts);
      const Condition* prev = &cur;
      for (const ForceRRound& round : res.rounds) {
        if (!extends(round.after, *prev, round.witness))
          stage_error(s, "R-stage round extension not verified");
        w = compose(w, round.witness);
        prev = &round.after;
      }
      if (res.status == ForceRResult::Status::Forced) {
        if (!unforced_parts(res.cond, spec.e, spec.i, reg, grounds).empty())
          stage_error(s, "R-stage left unforced parts");
        tr.stages.push_back(TraceStage{spec, "Forced", res.cond, w, std::nullopt, res.rounds});
        cur = res.cond;
      } else {
        tr.status = res.status == ForceRResult::Status::Unresolved ? "Unresolved"
                                                                   : "HypothesisViolated";
        tr.detail = res.detail;
        tr.h = res.h;
        tr.stages.push_back(TraceStage{spec, tr.status, res.cond, w, std::nullopt, res.rounds});
        return tr;
      }
    }
    if (acceptable_parts(cur, grounds, 1).empty())
      stage_error(s, "condition lost all acceptable parts");
  }
  select_path_and_extract_g(tr);
  return tr;
}

Bits select_path_and_extract_g(Trace& trace) {
  const GroundSets& grounds = trace.grounds;
  if (trace.stages.empty()) {
    trace.g = Bits::zeros(grounds.universe);
    trace.chain.clear();
    return trace.g;
  }
  const Condition& final = trace.stages.back().after;
  std::set<std::size_t> candidates = acceptable_parts(final, grounds, 1);
  if (candidates.empty())
    for (std::size_t j = 0; j < final.parts; ++j) candidates.insert(j);
  std::size_t best = *candidates.begin();
  for (std::size_t j : candidates)
    if (final.stems[j].size() > final.stems[best].size()) best = j;
  std::vector<std::size_t> chain(trace.stages.size());
  chain.back() = best;
  for (std::size_t s = trace.stages.size(); s-- > 1;)
    chain[s - 1] = trace.stages[s].witness.at(chain[s]);
  for (std::size_t s = 1; s < trace.stages.size(); ++s)
    if (!is_prefix(trace.stages[s - 1].after.stems[chain[s - 1]],
                   trace.stages[s].after.stems[chain[s]]))
      throw std::runtime_error("select_path_and_extract_g: stems along chain do not nest");
  Bits g = Bits::zeros(grounds.universe);
  const Bits& stem = final.stems[best];
  for (std::size_t p = 0; p < stem.size() && p < grounds.universe; ++p) g.set(p, stem.at(p));
  for (std::size_t s = 0; s < trace.stages.size(); ++s)
    if (!satisfies_on_part(g, trace.stages[s].after, chain[s]))
      throw std::runtime_error("select_path_and_extract_g: G escapes the chain");
  if (grounds.universe <= 10) {
    // the nested satisfaction classes U_s, materialized
    std::vector<std::set<unsigned long>> us;
    for (std::size_t s = 0; s < trace.stages.size(); ++s) {
      std::set<unsigned long> u;
      for (unsigned long gv = 0; gv < (1ul << grounds.universe); ++gv) {
        Bits cand = Bits::zeros(grounds.universe);
        for (std::size_t p = 0; p < grounds.universe; ++p) cand.set(p, (gv >> p) & 1u);
        if (satisfies_on_part(cand, trace.stages[s].after, chain[s])) u.insert(gv);
      }
      if (u.empty()) throw std::runtime_error("select_path_and_extract_g: empty U_s");
      if (!us.empty() && !std::includes(us.back().begin(), us.back().end(), u.begin(), u.end()))
        throw std::runtime_error("select_path_and_extract_g: U_s not nested");
      us.push_back(std::move(u));
    }
  }
  trace.chain = std::move(chain);
  trace.g = g;
  return trace.g;
}

std::vector<RequirementReport> verify_requirements(const Bits& g, const GroundSets& grounds,
                                                   const Registry& reg, const Schedule& schedule) {
  std::vector<RequirementReport> out;
  Bits abar = grounds.a_bar();
  for (const StageSpec& spec : schedule.stages) {
    RequirementReport rep{spec, false, ""};
    if (spec.kind == StageSpec::Kind::Qm) {
      std::size_t in_a = restrict_to(g, grounds.a).count();
      std::size_t in_abar = restrict_to(g, abar).count();
      rep.ok = in_a >= spec.m && in_abar >= spec.m;
      std::ostringstream os;
      os << "|G^A|=" << in_a << " |G^Abar|=" << in_abar;
      rep.witness = os.str();
    } else {
      auto w = r_requirement_witness(g, spec.e, spec.i, reg, grounds);
      rep.ok = w.has_value();
      rep.witness = w.has_value() ? w->text() : "no witness";
    }
    out.push_back(std::move(rep));
  }
  return out;
}

CohesiveResult cohesive_construction(const std::vector<Bits>& sets, const GroundSets& grounds,
                                     const Registry& reg) {
  grounds.check();
  std::size_t n_sets = sets.size();
  std::size_t horizon = grounds.universe;
  for (const Bits& s : sets)
    if (s.size() != horizon)
      throw std::invalid_argument("cohesive_construction: set length != horizon");
  CohesiveResult out;
  Bits z = Bits::ones(horizon);
  Bits rho;
  for (std::size_t s = 0; s < n_sets; ++s) {
    CohesiveStage st;
    st.stem_before = rho;
    std::size_t need = (n_sets - s) + 1;
    auto thick = [&](const Bits& zz) {
      std::size_t c = 0;
      for (std::size_t p = rho.size(); p < horizon; ++p)
        if (zz.get(p)) ++c;
      return c >= need;
    };
    Bits kept = set_intersection(z, sets[s]);
    if (thick(kept)) {
      z = kept;
      st.kept_set = true;
    } else {
      Bits dropped = set_intersection(z, complement_of(sets[s]));
      if (!thick(dropped)) {
        std::ostringstream os;
        os << "cohesive_construction: remainder too thin at stage " << s;
        throw std::runtime_error(os.str());
      }
      z = dropped;
      st.kept_set = false;
    }
    std::size_t grow = rho.size();
    while (!z.get(grow)) ++grow;
    while (rho.size() < grow) rho.push_back(false);
    rho.push_back(true);
    // grab a diagonal hit for functional s when one is realizable in Z_s
    if (const FunctionalTable* table = reg.find(s)) {
      for (const FunctionalEntry& entry : table->entries) {
        if (st.hit.has_value()) break;
        EvalResult dv = diag(reg, entry.input, reg.stage_budget);
        if (!dv.has_value() || entry.output != *dv) continue;
        if (entry.settle_stage > reg.stage_budget) continue;
        bool ok = true;
        std::vector<std::size_t> need_one;
        for (const OracleConstraint& oc : entry.constraints) {
          if (oc.side == OracleSide::C) {
            if (grounds.c.get(oc.pos) != oc.bit) ok = false;
          } else if (oc.pos < rho.size()) {
            if (rho.at(oc.pos) != oc.bit) ok = false;
          } else if (oc.bit) {
            if (oc.pos < horizon && z.get(oc.pos))
              need_one.push_back(oc.pos);
            else
              ok = false;
          }
          if (!ok) break;
        }
        if (!ok) continue;
        std::size_t len = rho.size();
        for (const OracleConstraint& oc : entry.constraints)
          if (oc.side == OracleSide::G) len = std::max(len, oc.pos + 1);
        while (rho.size() < len) rho.push_back(false);
        for (std::size_t pos : need_one) rho.set(pos, true);
        st.hit = entry.input;
      }
    }
    st.z = z;
    out.stages.push_back(std::move(st));
  }
  out.g = Bits::zeros(horizon);
  for (std::size_t p = 0; p < rho.size() && p < horizon; ++p) out.g.set(p, rho.at(p));
  return out;
}

int StableColoringTable::at(std::size_t m, std::size_t n) const {
  auto it = color.find({m, n});
  if (it == color.end()) throw std::invalid_argument("StableColoringTable: pair not colored");
  return it->second;
}

StableColoring limit_partition(const StableColoringTable& f, std::size_t horizon) {
  StableColoring out;
  out.f1 = Bits::zeros(horizon);
  for (std::size_t n = 0; n < horizon; ++n) {
    std::size_t lo = std::max(n + 1, (horizon + 1) / 2);
    if (lo >= horizon) {
      out.flagged.push_back(n);  // no tail window above n
      continue;
    }
    bool all1 = true, all2 = true;
    for (std::size_t m = lo; m < horizon; ++m) {
      int c = f.at(m, n);
      all1 = all1 && c == 1;
      all2 = all2 && c == 2;
    }
    out.f1.set(n, all1);
    if (!all1 && !all2) out.flagged.push_back(n);
  }
  out.f2 = complement_of(out.f1);
  return out;
}

namespace {

json condition_to_json(const Condition& c) {
  json stems = json::array();
  for (const Bits& s : c.stems) stems.push_back(s.text());
  json nodes = json::array();
  for (const Bits& n : c.tree.nodes) nodes.push_back(n.text());
  return json{{"parts", c.parts},
              {"stems", stems},
              {"tree", json{{"parts", c.tree.parts}, {"depth", c.tree.depth}, {"nodes", nodes}}}};
}

Condition condition_from_json(const json& j) {
  Condition c;
  c.parts = j.at("parts").get<std::size_t>();
  for (const auto& s : j.at("stems")) c.stems.push_back(Bits::from_text(s.get<std::string>()));
  const json& t = j.at("tree");
  c.tree.parts = t.at("parts").get<std::size_t>();
  c.tree.depth = t.at("depth").get<std::size_t>();
  for (const auto& n : t.at("nodes")) c.tree.nodes.insert(Bits::from_text(n.get<std::string>()));
  return c;
}

json spec_to_json(const StageSpec& s) {
  if (s.kind == StageSpec::Kind::Qm) return json{{"kind", "Qm"}, {"m", s.m}};
  return json{{"kind", "R"}, {"e", s.e}, {"i", s.i}};
}

StageSpec spec_from_json(const json& j) {
  StageSpec s;
  if (j.at("kind").get<std::string>() == "Qm") {
    s.kind = StageSpec::Kind::Qm;
    s.m = j.at("m").get<std::size_t>();
  } else {
    s.kind = StageSpec::Kind::R;
    s.e = j.at("e").get<std::size_t>();
    s.i = j.at("i").get<std::size_t>();
  }
  return s;
}

Valuation valuation_from_text(const std::string& text) {
  Valuation p;
  std::size_t pos = 1;  // skip '{'
  while (pos < text.size() && text[pos] != '}') {
    std::size_t colon = text.find(':', pos);
    std::size_t n = std::stoul(text.substr(pos, colon - pos));
    p.values[n] = text[colon + 1] == '1';
    pos = colon + 2;
    if (pos < text.size() && text[pos] == ',') ++pos;
  }
  return p;
}

json round_to_json(const ForceRRound& r) {
  json vals = json::array();
  for (const Valuation& p : r.valuations) vals.push_back(p.text());
  json j{{"tag", r.tag},
         {"after", condition_to_json(r.after)},
         {"witness", r.witness},
         {"valuations", vals}};
  if (r.part.has_value()) j["part"] = *r.part;
  return j;
}

ForceRRound round_from_json(const json& j) {
  ForceRRound r;
  r.tag = j.at("tag").get<std::string>();
  r.after = condition_from_json(j.at("after"));
  r.witness = j.at("witness").get<ExtensionWitness>();
  for (const auto& v : j.at("valuations"))
    r.valuations.push_back(valuation_from_text(v.get<std::string>()));
  if (j.contains("part")) r.part = j.at("part").get<std::size_t>();
  return r;
}

}  // namespace

void write_trace(std::ostream& os, const Trace& trace, const Registry& reg) {
  json schedule = json::array();
  for (const StageSpec& s : trace.schedule.stages) schedule.push_back(spec_to_json(s));
  os << json{{"type", "header"},
             {"universe", trace.grounds.universe},
             {"a", trace.grounds.a.text()},
             {"c", trace.grounds.c.text()},
             {"registry", serialize_registry(reg)},
             {"schedule", schedule},
             {"budgets",
              json{{"depth", trace.schedule.budgets.depth},
                   {"domain_bound", trace.schedule.budgets.domain_bound},
                   {"threshold", trace.schedule.budgets.threshold}}}}
     << "\n";
  for (std::size_t s = 0; s < trace.stages.size(); ++s) {
    const TraceStage& st = trace.stages[s];
    json rounds = json::array();
    for (const ForceRRound& r : st.rounds) rounds.push_back(round_to_json(r));
    json j{{"type", "stage"},       {"index", s},
           {"spec", spec_to_json(st.spec)}, {"tag", st.tag},
           {"after", condition_to_json(st.after)}, {"witness", st.witness},
           {"rounds", rounds}};
    if (st.part.has_value()) j["part"] = *st.part;
    os << j << "\n";
  }
  json h = json::object();
  for (const auto& [n, v] : trace.h) h[std::to_string(n)] = v;
  os << json{{"type", "result"},
             {"status", trace.status},
             {"detail", trace.detail},
             {"h", h},
             {"chain", trace.chain},
             {"g", trace.g.text()}}
     << "\n";
}

Trace read_trace(std::istream& is, Registry& reg) {
  Trace trace;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      trace.grounds.universe = j.at("universe").get<std::size_t>();
      trace.grounds.a = Bits::from_text(j.at("a").get<std::string>());
      trace.grounds.c = Bits::from_text(j.at("c").get<std::string>());
      std::istringstream rs(j.at("registry").get<std::string>());
      reg = parse_registry(rs, trace.grounds.universe);
      for (const auto& sp : j.at("schedule"))
        trace.schedule.stages.push_back(spec_from_json(sp));
      const json& b = j.at("budgets");
      trace.schedule.budgets.depth = b.at("depth").get<std::size_t>();
      trace.schedule.budgets.domain_bound = b.at("domain_bound").get<std::size_t>();
      trace.schedule.budgets.threshold = b.at("threshold").get<std::size_t>();
      trace.initial = initial_condition(trace.grounds);
      have_header = true;
    } else if (type == "stage") {
      TraceStage st;
      st.spec = spec_from_json(j.at("spec"));
      st.tag = j.at("tag").get<std::string>();
      st.after = condition_from_json(j.at("after"));
      st.witness = j.at("witness").get<ExtensionWitness>();
      if (j.contains("part")) st.part = j.at("part").get<std::size_t>();
      for (const auto& r : j.at("rounds")) st.rounds.push_back(round_from_json(r));
      trace.stages.push_back(std::move(st));
    } else if (type == "result") {
      trace.status = j.at("status").get<std::string>();
      trace.detail = j.at("detail").get<std::string>();
      for (const auto& [key, v] : j.at("h").items()) trace.h[std::stoul(key)] = v.get<bool>();
      trace.chain = j.at("chain").get<std::vector<std::size_t>>();
      trace.g = Bits::from_text(j.at("g").get<std::string>());
    } else {
      throw std::invalid_argument("read_trace: unknown record type " + type);
    }
  }
  if (!have_header) throw std::invalid_argument("read_trace: missing header record");
  return trace;
}

std::vector<std::string> check_trace(const Trace& trace, const Registry& reg) {
  std::vector<std::string> out;
  auto note = [&](std::size_t s, const std::string& what) {
    std::ostringstream os;
    os << "stage " << s << ": " << what;
    out.push_back(os.str());
  };
  std::size_t horizon = trace.grounds.universe;
  const Condition* prev = &trace.initial;
  for (std::size_t s = 0; s < trace.stages.size(); ++s) {
    const TraceStage& st = trace.stages[s];
    for (const std::string& v : condition_violations(st.after, horizon)) note(s, v);
    bool completed = st.tag == "Qm" || st.tag == "Forced";
    if (completed && !extends(st.after, *prev, st.witness))
      note(s, "recorded witness does not verify the extension");
    if (st.tag == "Qm") {
      if (!st.part.has_value())
        note(s, "Q_m stage without a part");
      else if (!forces_qm(st.after, *st.part, trace.grounds, st.spec.m))
        note(s, "Q_m not forced on the recorded part");
    }
    if (st.tag == "Forced" &&
        !unforced_parts(st.after, st.spec.e, st.spec.i, reg, trace.grounds).empty())
      note(s, "R stage marked forced but parts remain unforced");
    const Condition* rprev = prev;
    for (std::size_t r = 0; r < st.rounds.size(); ++r) {
      if (!extends(st.rounds[r].after, *rprev, st.rounds[r].witness))
        note(s, "round extension does not verify");
      rprev = &st.rounds[r].after;
    }
    prev = &st.after;
  }
  if (trace.status == "complete" && !trace.stages.empty()) {
    if (trace.chain.size() != trace.stages.size()) {
      out.push_back("result: chain length does not match stage count");
    } else {
      for (std::size_t s = 0; s < trace.stages.size(); ++s)
        if (!satisfies_on_part(trace.g, trace.stages[s].after, trace.chain[s]))
          note(s, "extracted G does not satisfy the chain part");
      for (std::size_t s = 1; s < trace.stages.size(); ++s)
        if (trace.stages[s].witness.at(trace.chain[s]) != trace.chain[s - 1])
          note(s, "chain is not linked by the recorded witness");
    }
    for (const RequirementReport& rep :
         verify_requirements(trace.g, trace.grounds, reg, trace.schedule))
      if (!rep.ok) out.push_back("requirement " + rep.spec.text() + " unsatisfied by G");
  }
  return out;
}

}  // namespace ptsim
