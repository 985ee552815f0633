#include "fsr/obligations.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "fsr/measures.hpp"

namespace fsr {

namespace {

// Locator for the least-indexed counterexample: state id in the high half,
// then key/key/successor-index so ties resolve in loop order.  The byte
// fields bound the checkable instances to 256 keys and successors per
// t-state, plenty for desk-scale exploration.
uint64_t pack(size_t si, uint32_t a = 0, uint32_t b = 0, uint32_t c = 0,
              uint32_t flag = 0) {
  if (a > 0xff || b > 0xff || c > 0xff)
    throw std::invalid_argument(
        "obligation checks support at most 256 keys and successors");
  return (uint64_t{static_cast<uint32_t>(si)} << 32) | (uint64_t{a} << 24) |
         (b << 16) | (c << 8) | (flag & 0xff);
}

struct Loc {
  size_t si;
  uint32_t a, b, c, flag;
};

Loc unpack(uint64_t v) {
  return {static_cast<size_t>(v >> 32), static_cast<uint32_t>((v >> 24) & 0xff),
          static_cast<uint32_t>((v >> 16) & 0xff),
          static_cast<uint32_t>((v >> 8) & 0xff),
          static_cast<uint32_t>(v & 0xff)};
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start < s.size()) {
    size_t end = s.find('\n', start);
    if (end == std::string::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

using Items = std::vector<std::pair<std::string, std::string>>;

Items state_key_items(const System& sys, const SystemState& x, Key k) {
  return {{"x", sys.render_state(x)}, {"k", sys.keys().name(k)}};
}

}  // namespace

CheckReport check_system_props(const StateGraph& g, const System& sys,
                               ExecPolicy policy) {
  CheckReport r;
  r.suite = "system-props";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  r.states = g.num_states();
  r.qualified = !g.complete();

  TheoremResult self, init;
  self.name = "no-self-next";
  init.name = "init-satisfied";

  AtomicMin bad_self;
  AtomicCount cases;
  const uint32_t n = sys.nkeys();
  par_for(g.num_states(), policy, [&](size_t si) {
    const SystemState& x = g.state(si);
    for (Key k = 0; k < n; ++k)
      if (sys.def().t_next_check(x.at(k), x.at(k), x))
        bad_self.offer(pack(si, k));
    cases.add(n);
  });
  self.cases = cases.get();
  if (bad_self.hit()) {
    const Loc loc = unpack(bad_self.get());
    self.verdict = Verdict::Fail;
    self.cex = Counterexample{
        state_key_items(sys, g.state(loc.si), static_cast<Key>(loc.a)),
        "t_next_check relates the t-state to itself"};
  }

  init.cases = g.initial_ids().size();
  for (const uint32_t id : g.initial_ids()) {
    if (!sys.init(g.state(id))) {
      init.verdict = Verdict::Fail;
      init.cex =
          Counterexample{{{"x", sys.render_state(g.state(id))}},
                         "stored initial state does not satisfy sys_init"};
      break;
    }
  }
  r.theorems = {std::move(self), std::move(init)};
  return r;
}

CheckReport check_valid_task_obligations(const StateGraph& g,
                                         const System& sys,
                                         ExecPolicy policy) {
  if (!sys.def().validity)
    throw std::invalid_argument(sys.name() + ": no validity bundle");
  const auto& vb = *sys.def().validity;
  const auto& blok = sys.def().t_blok;
  const uint32_t n = sys.nkeys();

  CheckReport r;
  r.suite = "valid-task";
  r.system = sys.name();
  r.nkeys = n;
  r.states = g.num_states();
  r.qualified = !g.complete();

  AtomicMin h1, h2, h3, h4;
  AtomicCount c1, c2, c3, c4;
  par_for(g.num_states(), policy, [&](size_t si) {
    const SystemState& x = g.state(si);
    uint64_t pairs = 0, triples = 0;
    for (Key k = 0; k < n; ++k) {
      const TStateView gk = x.at(k);
      for (Key l = 0; l < n; ++l) {
        const TStateView gl = x.at(l);
        ++pairs;
        if (vb.t_noblk(gk, gl) && blok(gk, gl)) h1.offer(pack(si, k, l));
        if (blok(gk, gl) && !ord_lt(vb.t_nlock(l, x), vb.t_nlock(k, x)))
          h3.offer(pack(si, k, l));
      }
    }
    for (Key l = 0; l < n; ++l) {
      const TStateView gl = x.at(l);
      const auto succs = sys.succ_tstates(gl, x);
      for (size_t ci = 0; ci < succs.size(); ++ci) {
        const TStateView c = succs[ci];
        for (Key k = 0; k < n; ++k) {
          const TStateView gk = x.at(k);
          ++triples;
          const bool nb = vb.t_noblk(gk, gl);
          if (nb && !vb.t_noblk(gk, c))
            h2.offer(pack(si, k, l, static_cast<uint32_t>(ci)));
          if (!nb && !vb.t_noblk(gk, c) &&
              !(vb.t_nstrv(gk, c) < vb.t_nstrv(gk, gl)))
            h4.offer(pack(si, k, l, static_cast<uint32_t>(ci)));
        }
      }
    }
    c1.add(pairs);
    c3.add(pairs);
    c2.add(triples);
    c4.add(triples);
  });

  auto build = [&](const char* name, const AtomicMin& hit, uint64_t cases,
                   bool with_succ, const char* detail) {
    TheoremResult t;
    t.name = name;
    t.cases = cases;
    if (hit.hit()) {
      const Loc loc = unpack(hit.get());
      const SystemState& x = g.state(loc.si);
      const Key k = static_cast<Key>(loc.a), l = static_cast<Key>(loc.b);
      t.verdict = Verdict::Fail;
      Items items = {{"x", sys.render_state(x)},
                     {"k", sys.keys().name(k)},
                     {"l", sys.keys().name(l)}};
      if (with_succ) {
        const auto succs = sys.succ_tstates(x.at(l), x);
        items.push_back(
            {"c", sys.def().schema.render(succs.at(loc.c), sys.keys())});
        if (std::string_view(name) == "t-nstrv-decreases") {
          items.push_back({"nstrv-before",
                           std::to_string(vb.t_nstrv(x.at(k), x.at(l)))});
          items.push_back(
              {"nstrv-after",
               std::to_string(vb.t_nstrv(x.at(k), succs.at(loc.c)))});
        }
      } else if (std::string_view(name) == "t-nlock-decreases") {
        items.push_back({"nlock-k", to_string(vb.t_nlock(k, x))});
        items.push_back({"nlock-l", to_string(vb.t_nlock(l, x))});
      }
      t.cex = Counterexample{std::move(items), detail};
    }
    return t;
  };
  r.theorems = {
      build("t-noblk-blk", h1, c1.get(), false,
            "t_noblk(g k x, g l x) holds but so does t_blok"),
      build("t-noblk-inv", h2, c2.get(), true,
            "t_noblk lost across a t_next step of l"),
      build("t-nlock-decreases", h3, c3.get(), false,
            "t_blok holds but t_nlock(l) is not below t_nlock(k)"),
      build("t-nstrv-decreases", h4, c4.get(), true,
            "t_nstrv did not strictly decrease across l's step"),
  };
  return r;
}

CheckReport check_match_obligations(const StateGraph& g, const System& impl,
                                    const System& spec, ExecPolicy policy) {
  if (!impl.def().refinement)
    throw std::invalid_argument(impl.name() + ": no refinement bundle");
  const auto& rb = *impl.def().refinement;
  const uint32_t n = impl.nkeys();

  CheckReport r;
  r.suite = "match";
  r.system = impl.name();
  r.nkeys = n;
  r.states = g.num_states();
  r.qualified = !g.complete();

  AtomicMin h_next, h_stut, h_stab;
  AtomicCount c_next, c_stut, c_stab;
  par_for(g.num_states(), policy, [&](size_t si) {
    const SystemState& x = g.state(si);
    const SystemState mx = impl.map_state(x);
    uint64_t nn = 0, ns = 0, nr = 0;
    for (Key k = 0; k < n; ++k) {
      const TStateView gk = x.at(k);
      const auto succs = impl.succ_tstates(gk, x);
      for (size_t ci = 0; ci < succs.size(); ++ci) {
        const TState mc = rb.t_map(succs[ci]);
        if (tstate_eq(mc, mx.at(k))) {
          ++ns;
          if (!ord_lt(rb.t_rank(succs[ci]), rb.t_rank(gk)))
            h_stut.offer(pack(si, k, k, static_cast<uint32_t>(ci)));
        } else if (!impl.blok(x, k)) {
          ++nn;
          SystemState my = mx;
          my.set(k, mc);
          if (!spec.next_check(mx, my, k) || spec.blok(mx, k))
            h_next.offer(pack(si, k, k, static_cast<uint32_t>(ci)));
        }
        const SystemState y = impl.with(x, k, succs[ci]);
        for (Key k2 = 0; k2 < n; ++k2) {
          if (k2 == k) continue;
          ++nr;
          if (!ord_le(rb.t_rank(y.at(k2)), rb.t_rank(x.at(k2))))
            h_stab.offer(pack(si, k2, k, static_cast<uint32_t>(ci)));
        }
      }
    }
    c_next.add(nn);
    c_stut.add(ns);
    c_stab.add(nr);
  });

  auto build = [&](const char* name, const AtomicMin& hit, uint64_t cases,
                   const char* detail) {
    TheoremResult t;
    t.name = name;
    t.cases = cases;
    if (hit.hit()) {
      const Loc loc = unpack(hit.get());
      const SystemState& x = g.state(loc.si);
      const Key k = static_cast<Key>(loc.a);
      const Key stepper = static_cast<Key>(loc.b);
      const auto succs = impl.succ_tstates(x.at(stepper), x);
      t.verdict = Verdict::Fail;
      Items items = {{"x", impl.render_state(x)},
                     {"k", impl.keys().name(k)},
                     {"l", impl.keys().name(stepper)},
                     {"c", impl.def().schema.render(succs.at(loc.c),
                                                    impl.keys())},
                     {"mapped-x", spec.render_state(impl.map_state(x))}};
      t.cex = Counterexample{std::move(items), detail};
    }
    return t;
  };
  r.theorems = {
      build("map-matches-next", h_next, c_next.get(),
            "changed mapped state is not a legal unblocked spec step"),
      build("map-finite-stutter", h_stut, c_stut.get(),
            "unchanged mapped state without a strict rank decrease"),
      build("map-rank-stable", h_stab, c_stab.get(),
            "rank of an unselected key increased"),
  };
  return r;
}

CheckReport check_derived_system_obligations(const StateGraph& g,
                                             const System& sys,
                                             ExecPolicy policy) {
  if (!sys.def().validity)
    throw std::invalid_argument(sys.name() + ": no validity bundle");
  const uint32_t n = sys.nkeys();

  CheckReport r;
  r.suite = "derived-system";
  r.system = sys.name();
  r.nkeys = n;
  r.states = g.num_states();
  r.qualified = !g.complete();

  AtomicMin h_nb, h_inv, h_stv, h_dec, h_hold, h_pers, h_term, h_len;
  AtomicCount c_nb, c_inv, c_stv, c_dec, c_hold, c_pers;

  par_for(g.num_states(), policy, [&](size_t si) {
    const SystemState& x = g.state(si);
    struct PerKey {
      bool noblk = false, blocked = false, broken = false;
      Key stv = 0;
      Ord nstrv;
    };
    std::vector<PerKey> pk(n);
    uint64_t nb = 0, stv_cases = 0;
    for (Key k = 0; k < n; ++k) {
      PerKey& p = pk[k];
      p.noblk = sys_noblk(k, x, sys);
      p.blocked = sys.blok(x, k);
      ++nb;
      if (p.noblk && p.blocked) h_nb.offer(pack(si, k));
      try {
        const auto trace = starver_trace(k, x, sys);
        p.stv = trace.back().key;
        if (trace.size() > n) {
          h_len.offer(pack(si, k));
          p.broken = true;
          continue;
        }
        std::vector<uint64_t> sums;
        for (const auto& e : trace) sums.push_back(e.sum_nsts);
        p.nstrv = nats_to_ord(n, std::span<const uint64_t>(sums));
      } catch (const PikblkCycleError&) {
        h_term.offer(pack(si, k));
        p.broken = true;
        continue;
      }
      if (!p.noblk) {
        ++stv_cases;
        if (sys.blok(x, p.stv)) h_stv.offer(pack(si, k));
      }
    }
    c_nb.add(nb);
    c_stv.add(stv_cases);

    uint64_t n_inv = 0, n_dec = 0, n_hold = 0, n_pers = 0;
    for (Key l = 0; l < n; ++l) {
      const auto succs = sys.succ_tstates(x.at(l), x);
      for (size_t ci = 0; ci < succs.size(); ++ci) {
        const SystemState y = sys.with(x, l, succs[ci]);
        for (Key k = 0; k < n; ++k) {
          if (k == l || pk[k].broken) continue;
          const auto u = static_cast<uint32_t>(ci);
          if (pk[k].noblk) {
            ++n_inv;
            if (!sys_noblk(k, y, sys)) h_inv.offer(pack(si, k, l, u));
            continue;
          }
          Ord ny;
          Key stv_y = 0;
          try {
            const auto ty = starver_trace(k, y, sys);
            stv_y = ty.back().key;
            if (ty.size() > n) {
              h_len.offer(pack(si, k, l, u, 1));
              continue;
            }
            std::vector<uint64_t> sums;
            for (const auto& e : ty) sums.push_back(e.sum_nsts);
            ny = nats_to_ord(n, std::span<const uint64_t>(sums));
          } catch (const PikblkCycleError&) {
            h_term.offer(pack(si, k, l, u, 1));
            continue;
          }
          ++n_hold;
          if (!ord_le(ny, pk[k].nstrv)) h_hold.offer(pack(si, k, l, u));
          if (l == pk[k].stv && pk[k].stv != k) {
            ++n_dec;
            if (!ord_lt(ny, pk[k].nstrv)) h_dec.offer(pack(si, k, l, u));
          }
          if (l != pk[k].stv) {
            ++n_pers;
            if (ny == pk[k].nstrv && stv_y != pk[k].stv)
              h_pers.offer(pack(si, k, l, u));
          }
        }
      }
    }
    c_inv.add(n_inv);
    c_dec.add(n_dec);
    c_hold.add(n_hold);
    c_pers.add(n_pers);
  });

  auto build = [&](const char* name, const AtomicMin& hit, uint64_t cases,
                   bool with_succ, const char* detail) {
    TheoremResult t;
    t.name = name;
    t.cases = cases;
    if (hit.hit()) {
      const Loc loc = unpack(hit.get());
      const SystemState& x = g.state(loc.si);
      t.verdict = Verdict::Fail;
      Items items = {{"x", sys.render_state(x)},
                     {"k", sys.keys().name(static_cast<Key>(loc.a))}};
      if (with_succ) {
        const Key k = static_cast<Key>(loc.a), l = static_cast<Key>(loc.b);
        items.push_back({"l", sys.keys().name(l)});
        const auto succs = sys.succ_tstates(x.at(l), x);
        items.push_back(
            {"c", sys.def().schema.render(succs.at(loc.c), sys.keys())});
        const std::string_view n(name);
        if (n == "nstrv-decreases" || n == "nstrv-holds") {
          items.push_back({"sys-nstrv-x", to_string(sys_nstrv(k, x, sys))});
          items.push_back(
              {"sys-nstrv-y",
               to_string(sys_nstrv(
                   k, sys.with(x, l, succs.at(loc.c)), sys))});
        }
      }
      t.cex = Counterexample{std::move(items), detail};
    }
    return t;
  };
  TheoremResult term;
  term.name = "starver-terminates";
  term.cases = c_nb.get();
  if (h_term.hit()) {
    const Loc loc = unpack(h_term.get());
    const SystemState& x = g.state(loc.si);
    term.verdict = Verdict::Fail;
    Items items = {{"k", sys.keys().name(static_cast<Key>(loc.a))}};
    if (loc.flag) {
      const auto succs = sys.succ_tstates(x.at(static_cast<Key>(loc.b)), x);
      items.push_back(
          {"x", sys.render_state(sys.with(x, static_cast<Key>(loc.b),
                                          succs.at(loc.c)))});
    } else {
      items.push_back({"x", sys.render_state(x)});
    }
    term.cex = Counterexample{std::move(items),
                              "pikblk chain revisits a key (t_nlock "
                              "obligation violated); starver would diverge"};
  }
  TheoremResult len;
  len.name = "nstrvs-length";
  len.cases = c_nb.get();
  if (h_len.hit()) {
    const Loc loc = unpack(h_len.get());
    const SystemState& x = g.state(loc.si);
    len.verdict = Verdict::Fail;
    Items items = {{"k", sys.keys().name(static_cast<Key>(loc.a))}};
    if (loc.flag) {
      const auto succs = sys.succ_tstates(x.at(static_cast<Key>(loc.b)), x);
      items.push_back(
          {"x", sys.render_state(sys.with(x, static_cast<Key>(loc.b),
                                          succs.at(loc.c)))});
    } else {
      items.push_back({"x", sys.render_state(x)});
    }
    len.cex =
        Counterexample{std::move(items), "pikblk chain longer than card(keys)"};
  }
  r.theorems = {
      build("noblk-blk", h_nb, c_nb.get(), false,
            "sys_noblk holds for a blocked key"),
      build("noblk-inv", h_inv, c_inv.get(), true,
            "sys_noblk lost across another key's step"),
      build("starver-unblocked", h_stv, c_stv.get(), false,
            "starver(k, x) is blocked in x"),
      build("nstrv-decreases", h_dec, c_dec.get(), true,
            "sys_nstrv did not strictly decrease on the starver's step"),
      build("nstrv-holds", h_hold, c_hold.get(), true,
            "sys_nstrv increased on another key's step"),
      build("starver-persists", h_pers, c_pers.get(), true,
            "sys_nstrv unchanged but the starver moved"),
      std::move(term),
      std::move(len),
  };
  return r;
}

CheckReport check_state_invariant(const StateGraph& g, const System& sys,
                                  const StateInvariant& inv,
                                  ExecPolicy policy) {
  CheckReport r;
  r.suite = "invariants";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  r.states = g.num_states();
  r.qualified = !g.complete();

  TheoremResult t;
  t.name = inv.name;
  t.cases = g.num_states();
  AtomicMin bad;
  par_for(g.num_states(), policy, [&](size_t si) {
    if (!inv.holds(g.state(si), sys.keys())) bad.offer(si);
  });
  if (bad.hit()) {
    t.verdict = Verdict::Fail;
    t.cex = Counterexample{
        {{"x", sys.render_state(g.state(bad.get()))}},
        "invariant violated on a reachable state"};
  }
  r.theorems.push_back(std::move(t));
  return r;
}

CheckReport check_state_invariants(const StateGraph& g, const System& sys,
                                   ExecPolicy policy) {
  CheckReport r;
  r.suite = "invariants";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  r.states = g.num_states();
  r.qualified = !g.complete();
  if (sys.def().invariants.empty()) {
    r.note = "no invariants registered";
    return r;
  }
  for (const auto& inv : sys.def().invariants) {
    CheckReport one = check_state_invariant(g, sys, inv, policy);
    r.theorems.push_back(std::move(one.theorems.at(0)));
  }
  return r;
}

std::vector<TState> blocking_domain(const System& sys) {
  std::vector<TState> domain;
  if (sys.def().tstate_domain) {
    domain = sys.def().tstate_domain(sys.keys());
  } else {
    System one(sys.def_ptr(), 1);
    const StateGraph g = explore(one, ExploreOptions{});
    if (!g.complete())
      throw std::runtime_error(
          "blocking_domain: 1-key closure did not complete");
    std::set<TState> uniq;
    for (uint32_t id = 0; id < g.num_states(); ++id) {
      const TStateView a = g.state(id).at(0);
      uniq.insert(TState(a.begin(), a.end()));
    }
    domain.assign(uniq.begin(), uniq.end());
  }
  std::sort(domain.begin(), domain.end());
  return domain;
}

std::vector<BlockingCycle> find_blocking_cycles(const System& sys,
                                                std::span<const TState> domain,
                                                uint32_t max_len) {
  const size_t d = domain.size();
  std::vector<std::vector<bool>> adj(d, std::vector<bool>(d, false));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j)
      adj[i][j] = sys.def().t_blok(domain[i], domain[j]);

  std::vector<BlockingCycle> out;
  std::vector<size_t> path;
  std::vector<bool> onpath(d, false);
  // simple cycles whose least node comes first, so each cycle appears once
  std::function<void(size_t, size_t)> dfs = [&](size_t s, size_t cur) {
    if (adj[cur][s]) {
      BlockingCycle cyc;
      for (const size_t i : path) cyc.tstates.push_back(domain[i]);
      out.push_back(std::move(cyc));
    }
    if (path.size() >= max_len) return;
    for (size_t nxt = s + 1; nxt < d; ++nxt) {
      if (onpath[nxt] || !adj[cur][nxt]) continue;
      onpath[nxt] = true;
      path.push_back(nxt);
      dfs(s, nxt);
      path.pop_back();
      onpath[nxt] = false;
    }
  };
  for (size_t s = 0; s < d; ++s) {
    path = {s};
    onpath[s] = true;
    dfs(s, s);
    onpath[s] = false;
  }
  return out;
}

namespace {

std::vector<std::vector<Key>> key_permutations(uint32_t n) {
  std::vector<Key> perm(n);
  for (uint32_t i = 0; i < n; ++i) perm[i] = i;
  std::vector<std::vector<Key>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool cycle_realized(const System& inst, const BlockingCycle& cycle,
                    const SystemState& x, const std::vector<Key>& perm) {
  const uint32_t n = static_cast<uint32_t>(cycle.tstates.size());
  for (uint32_t i = 0; i < n; ++i) {
    if (!inst.def().schema.matches_ignoring_keys(x.at(perm[i]),
                                                 cycle.tstates[i]))
      return false;
    if (!inst.def().t_blok(x.at(perm[i]), x.at(perm[(i + 1) % n])))
      return false;
  }
  return true;
}

}  // namespace

CheckReport check_cycle_reachability(const System& sys,
                                     const BlockingCycle& cycle,
                                     const ExploreOptions& opts) {
  const uint32_t n = static_cast<uint32_t>(cycle.tstates.size());
  System inst(sys.def_ptr(), n);
  const StateGraph g = explore(inst, opts);

  CheckReport r;
  r.suite = "cycle-reachability";
  r.system = sys.name();
  r.nkeys = n;
  r.states = g.num_states();
  r.qualified = !g.complete();

  TheoremResult t;
  t.name = "cycle-unreachable";
  const auto perms = key_permutations(n);
  AtomicMin hit;
  AtomicCount cases;
  par_for(g.num_states(), opts.policy, [&](size_t si) {
    const SystemState& x = g.state(si);
    for (size_t pi = 0; pi < perms.size(); ++pi) {
      if (cycle_realized(inst, cycle, x, perms[pi]))
        hit.offer(pack(si, static_cast<uint32_t>(pi)));
    }
    cases.add(perms.size());
  });
  t.cases = cases.get();
  if (hit.hit()) {
    const Loc loc = unpack(hit.get());
    const auto& perm = perms[loc.a];
    t.verdict = Verdict::Fail;
    std::string assign;
    std::string cyc_text;
    for (uint32_t i = 0; i < n; ++i) {
      if (i) assign += ' ';
      assign += inst.keys().name(perm[i]);
      cyc_text += inst.def().schema.render(cycle.tstates[i], inst.keys());
      cyc_text += '\n';
    }
    t.cex = Counterexample{{{"x", inst.render_state(g.state(loc.si))},
                            {"assignment", assign},
                            {"cycle", cyc_text}},
                           "reachable state realizes the blocking cycle"};
  }
  r.theorems.push_back(std::move(t));
  return r;
}

CycleSearchResult run_cycle_search(const System& sys, uint32_t max_len,
                                   const ExploreOptions& opts) {
  CycleSearchResult res;
  const auto domain = blocking_domain(sys);
  res.cycles = find_blocking_cycles(sys, domain, max_len);

  res.summary.suite = "cycles";
  res.summary.system = sys.name();
  res.summary.nkeys = sys.nkeys();
  res.summary.states = domain.size();
  res.summary.note = "domain=" + std::to_string(domain.size()) +
                     " max-len=" + std::to_string(max_len);

  const KeySet& render_keys = sys.keys();
  TheoremResult pot;
  pot.name = "no-potential-cycles";
  pot.cases = domain.size() * domain.size();
  TheoremResult reach;
  reach.name = "no-reachable-cycles";
  reach.cases = res.cycles.size();

  for (const auto& cyc : res.cycles) {
    if (pot.verdict == Verdict::Pass) {
      pot.verdict = Verdict::Fail;
      std::string text;
      for (const auto& ts : cyc.tstates)
        text += sys.def().schema.render(ts, render_keys) + '\n';
      pot.cex = Counterexample{{{"cycle", text}},
                               "blocking relation admits a cycle"};
    }
    CheckReport cr = check_cycle_reachability(sys, cyc, opts);
    if (!cr.all_pass()) {
      res.any_reachable = true;
      if (reach.verdict == Verdict::Pass) {
        reach.verdict = Verdict::Fail;
        reach.cex = cr.theorems.at(0).cex;
      }
    }
    res.reachability.push_back(std::move(cr));
  }
  res.summary.theorems = {std::move(pot), std::move(reach)};
  return res;
}

bool replay_counterexample(const System& sys, const System* spec,
                           std::string_view theorem,
                           const Counterexample& cex) {
  auto state_of = [&](const char* label) {
    const std::string* payload = cex.find(label);
    if (!payload) throw std::invalid_argument("replay: missing " +
                                              std::string(label));
    const auto lines = split_lines(*payload);
    auto st = sys.parse_state(lines);
    if (!st) throw std::invalid_argument("replay: unparsable state");
    return *st;
  };
  auto key_of = [&](const char* label) {
    const std::string* payload = cex.find(label);
    if (!payload) throw std::invalid_argument("replay: missing key item");
    const auto k = sys.keys().find(*payload);
    if (!k) throw std::invalid_argument("replay: unknown key " + *payload);
    return *k;
  };
  auto tstate_of = [&](const char* label) {
    const std::string* payload = cex.find(label);
    if (!payload) throw std::invalid_argument("replay: missing t-state item");
    auto ts = sys.def().schema.parse(*payload, sys.keys());
    if (!ts) throw std::invalid_argument("replay: unparsable t-state");
    return *ts;
  };

  if (theorem == "no-self-next") {
    const SystemState x = state_of("x");
    const Key k = key_of("k");
    return !sys.def().t_next_check(x.at(k), x.at(k), x);
  }
  if (theorem == "init-satisfied") return sys.init(state_of("x"));

  if (theorem == "t-noblk-blk" || theorem == "t-noblk-inv" ||
      theorem == "t-nlock-decreases" || theorem == "t-nstrv-decreases") {
    const auto& vb = *sys.def().validity;
    const SystemState x = state_of("x");
    const Key k = key_of("k"), l = key_of("l");
    const TStateView gk = x.at(k), gl = x.at(l);
    if (theorem == "t-noblk-blk")
      return !(vb.t_noblk(gk, gl) && sys.def().t_blok(gk, gl));
    if (theorem == "t-nlock-decreases")
      return !sys.def().t_blok(gk, gl) ||
             ord_lt(vb.t_nlock(l, x), vb.t_nlock(k, x));
    const TState c = tstate_of("c");
    if (!sys.def().t_next_check(gl, c, x)) return true;
    if (theorem == "t-noblk-inv")
      return !vb.t_noblk(gk, gl) || vb.t_noblk(gk, c);
    return vb.t_noblk(gk, gl) || vb.t_noblk(gk, c) ||
           vb.t_nstrv(gk, c) < vb.t_nstrv(gk, gl);
  }

  if (theorem == "map-matches-next" || theorem == "map-finite-stutter" ||
      theorem == "map-rank-stable") {
    const auto& rb = *sys.def().refinement;
    const SystemState x = state_of("x");
    const Key k = key_of("k"), l = key_of("l");
    const TState c = tstate_of("c");
    if (!sys.def().t_next_check(x.at(l), c, x)) return true;
    const SystemState y = sys.with(x, l, c);
    if (theorem == "map-rank-stable")
      return ord_le(rb.t_rank(y.at(k)), rb.t_rank(x.at(k)));
    const SystemState mx = sys.map_state(x), my = sys.map_state(y);
    if (theorem == "map-finite-stutter")
      return !(mx == my) || ord_lt(rb.t_rank(c), rb.t_rank(x.at(k)));
    if (mx == my || sys.blok(x, k)) return true;
    if (!spec) throw std::invalid_argument("replay: spec system required");
    return spec->next_check(mx, my, k) && !spec->blok(mx, k);
  }

  if (theorem == "noblk-blk") {
    const SystemState x = state_of("x");
    const Key k = key_of("k");
    return !(sys_noblk(k, x, sys) && sys.blok(x, k));
  }
  if (theorem == "starver-unblocked") {
    const SystemState x = state_of("x");
    const Key k = key_of("k");
    if (sys_noblk(k, x, sys)) return true;
    try {
      return !sys.blok(x, starver(k, x, sys));
    } catch (const PikblkCycleError&) {
      return false;
    }
  }
  if (theorem == "starver-terminates") {
    const SystemState x = state_of("x");
    const Key k = key_of("k");
    try {
      starver_trace(k, x, sys);
      return true;
    } catch (const PikblkCycleError&) {
      return false;
    }
  }
  if (theorem == "nstrvs-length") {
    const SystemState x = state_of("x");
    const Key k = key_of("k");
    return starver_trace(k, x, sys).size() <= sys.nkeys();
  }
  if (theorem == "noblk-inv" || theorem == "nstrv-decreases" ||
      theorem == "nstrv-holds" || theorem == "starver-persists") {
    const SystemState x = state_of("x");
    const Key k = key_of("k"), l = key_of("l");
    const TState c = tstate_of("c");
    if (!sys.def().t_next_check(x.at(l), c, x)) return true;
    const SystemState y = sys.with(x, l, c);
    if (theorem == "noblk-inv")
      return !sys_noblk(k, x, sys) || sys_noblk(k, y, sys);
    if (sys_noblk(k, x, sys)) return true;
    const Ord nx = sys_nstrv(k, x, sys);
    Ord ny;
    try {
      ny = sys_nstrv(k, y, sys);
    } catch (const PikblkCycleError&) {
      return false;
    }
    if (theorem == "nstrv-holds") return ord_le(ny, nx);
    if (theorem == "nstrv-decreases") {
      if (starver(k, x, sys) != l || l == k) return true;
      return ord_lt(ny, nx);
    }
    const Key stv = starver(k, x, sys);
    if (l == stv || !(ny == nx)) return true;
    return starver(k, y, sys) == stv;
  }
  if (theorem == "cycle-unreachable") {
    const SystemState x = state_of("x");
    const std::string* assign = cex.find("assignment");
    const std::string* cyc = cex.find("cycle");
    if (!assign || !cyc) throw std::invalid_argument("replay: missing items");
    std::vector<Key> perm;
    size_t start = 0;
    while (start < assign->size()) {
      size_t end = std::min(assign->find(' ', start), assign->size());
      const auto k = sys.keys().find(assign->substr(start, end - start));
      if (!k) throw std::invalid_argument("replay: unknown key in assignment");
      perm.push_back(*k);
      start = end + 1;
    }
    BlockingCycle cycle;
    for (const auto& line : split_lines(*cyc)) {
      auto ts = sys.def().schema.parse(line, sys.keys());
      if (!ts) throw std::invalid_argument("replay: unparsable cycle t-state");
      cycle.tstates.push_back(*ts);
    }
    return !cycle_realized(sys, cycle, x, perm);
  }
  // user invariants are replayed by name
  for (const auto& inv : sys.def().invariants) {
    if (theorem == inv.name) return inv.holds(state_of("x"), sys.keys());
  }
  if (theorem == "run-init") return sys.init(state_of("x"));
  if (theorem == "run-steps") {
    const SystemState x = state_of("x"), y = state_of("y");
    const std::string* pick = cex.find("pick");
    if (!pick) throw std::invalid_argument("replay: missing pick");
    const Selector sel = *pick == "-"
                             ? Selector::stutter()
                             : Selector::key(*sys.keys().find(*pick));
    return sys.legal_step(x, y, sel);
  }
  throw std::invalid_argument("replay: unsupported theorem " +
                              std::string(theorem));
}

}  // namespace fsr
