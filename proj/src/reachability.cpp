#include "fsr/reachability.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace fsr {

std::string_view to_string(Completeness c) {
  switch (c) {
    case Completeness::Complete:
      return "complete";
    case Completeness::TruncatedByDepth:
      return "truncated-by-depth";
    case Completeness::TruncatedByCap:
      return "truncated-by-cap";
  }
  return "?";
}

uint32_t StateGraph::insert(SystemState s) {
  const uint64_t h = s.hash();
  auto& bucket = index_[h];
  for (const uint32_t id : bucket)
    if (states_[id] == s) return id;
  const uint32_t id = static_cast<uint32_t>(states_.size());
  states_.push_back(std::move(s));
  bucket.push_back(id);
  return id;
}

std::optional<uint32_t> StateGraph::find(const SystemState& s) const {
  const auto it = index_.find(s.hash());
  if (it == index_.end()) return std::nullopt;
  for (const uint32_t id : it->second)
    if (states_[id] == s) return id;
  return std::nullopt;
}

StateGraph explore(const System& sys, const ExploreOptions& opts) {
  if (!sys.has_enum())
    throw std::logic_error("explore: " + sys.name() +
                           " has no successor enumerator");
  const bool canon = opts.use_canon && sys.has_canon();
  StateGraph g;
  {
    SystemState x0 = sys.initial_state();
    if (canon) x0 = sys.canon(x0);
    g.mark_initial(g.insert(std::move(x0)));
  }
  std::vector<uint32_t> frontier = {0};
  uint32_t level = 0;
  while (!frontier.empty()) {
    if (opts.depth && level >= *opts.depth) {
      g.set_completeness(Completeness::TruncatedByDepth);
      return g;
    }
    ++level;

    // Expand every frontier state into its own slot; the slot-ordered merge
    // below makes the result independent of scheduling.
    struct Succ {
      Key k;
      SystemState y;
    };
    std::vector<std::vector<Succ>> slots(frontier.size());
    par_for(frontier.size(), opts.policy, [&](size_t i) {
      const SystemState& x = g.state(frontier[i]);
      for (Key k = 0; k < sys.nkeys(); ++k) {
        if (sys.blok(x, k)) continue;  // legal steps only
        for (TState& c : sys.succ_tstates(x.at(k), x)) {
          SystemState y = sys.with(x, k, c);
          if (canon) y = sys.canon(y);
          slots[i].push_back({k, std::move(y)});
        }
      }
    });

    bool capped = false;
    std::vector<uint32_t> next;
    for (size_t i = 0; i < slots.size(); ++i) {
      for (auto& s : slots[i]) {
        const auto existing = g.find(s.y);
        uint32_t id;
        if (existing) {
          id = *existing;
        } else if (g.num_states() >= opts.state_cap) {
          capped = true;
          continue;
        } else {
          id = g.insert(std::move(s.y));
          next.push_back(id);
        }
        g.add_edge(frontier[i], s.k, id);
      }
    }
    if (capped) {
      g.set_completeness(Completeness::TruncatedByCap);
      return g;
    }
    frontier = std::move(next);
  }
  g.set_completeness(Completeness::Complete);
  return g;
}

void dump_graph(std::ostream& os, const StateGraph& g, const System& sys) {
  os << "fsr-graph 1 flag=" << to_string(g.completeness())
     << " states=" << g.num_states() << " edges=" << g.transitions().size()
     << '\n';
  for (uint32_t id = 0; id < g.num_states(); ++id) {
    os << "state " << id << '\n' << sys.render_state(g.state(id));
  }
  for (const Transition& e : g.transitions()) {
    os << "edge " << e.src << ' ' << sys.keys().name(e.key) << ' ' << e.dst
       << '\n';
  }
}

namespace {

// Drops key d from x and renames the remaining keys onto 0..n-2,
// rewriting KeyName fields to match.
SystemState project_state(const SystemState& x, Key drop,
                          const TStateSchema& schema) {
  SystemState out(x.nkeys() - 1, x.width());
  Key to = 0;
  for (Key from = 0; from < x.nkeys(); ++from) {
    if (from == drop) continue;
    TState ts(x.at(from).begin(), x.at(from).end());
    for (size_t f = 0; f < schema.fields().size(); ++f)
      if (schema.fields()[f].kind == FieldKind::KeyName) ts[f] = to;
    out.set(to, ts);
    ++to;
  }
  return out;
}

}  // namespace

CheckReport substate_closure_check(const System& sys,
                                   const ExploreOptions& opts) {
  CheckReport r;
  r.suite = "substate-closure";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  TheoremResult t;
  t.name = "projection-closed";

  if (!sys.def().state_independent) {
    t.verdict = Verdict::Inapplicable;
    r.note =
        "t_next reads the whole system state; the check applies to "
        "state-independent systems only";
    r.theorems.push_back(std::move(t));
    return r;
  }
  const uint32_t n = sys.nkeys();
  if (n < 2)
    throw std::invalid_argument("substate_closure_check: needs >= 2 keys");

  System sub(sys.def_ptr(), n - 1);
  const StateGraph gn = explore(sys, opts);
  const StateGraph gm = explore(sub, opts);
  r.states = gn.num_states();
  r.qualified = !gn.complete() || !gm.complete();

  AtomicMin first;
  AtomicCount cases;
  par_for(gn.num_states(), opts.policy, [&](size_t i) {
    const SystemState& x = gn.state(i);
    for (Key d = 0; d < n; ++d) {
      cases.add(1);
      SystemState p = project_state(x, d, sys.def().schema);
      if (opts.use_canon && sub.has_canon()) p = sub.canon(p);
      if (!gm.find(p)) first.offer((uint64_t{static_cast<uint32_t>(i)} << 8) | d);
    }
  });
  t.cases = cases.get();
  if (first.hit()) {
    const uint64_t loc = first.get();
    const auto i = static_cast<uint32_t>(loc >> 8);
    const Key d = static_cast<Key>(loc & 0xff);
    SystemState p = project_state(gn.state(i), d, sys.def().schema);
    if (opts.use_canon && sub.has_canon()) p = sub.canon(p);
    t.verdict = Verdict::Fail;
    t.cex = Counterexample{
        {{"x", sys.render_state(gn.state(i))},
         {"dropped-key", sys.keys().name(d)},
         {"projection", sub.render_state(p)}},
        "projection unreachable in the " + std::to_string(n - 1) +
            "-key instance"};
  }
  r.theorems.push_back(std::move(t));
  return r;
}

}  // namespace fsr
