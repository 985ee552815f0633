#include "fsr/run_engine.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "fsr/measures.hpp"

namespace fsr {

uint64_t derive_seed(uint64_t master, uint64_t stream) {
  // splitmix64 over master + stream index
  uint64_t z = master + stream * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

class RoundRobin final : public Scheduler {
 public:
  explicit RoundRobin(uint32_t n) : n_(n) {}
  Selector pick(uint64_t i) override {
    t_ = i;
    return Selector::key(static_cast<Key>((i - 1) % n_));
  }
  std::string descriptor() const override { return "rr"; }
  uint64_t bound() const override { return n_; }
  std::string fingerprint() const override {
    return std::to_string(t_ % n_);
  }

 private:
  uint32_t n_;
  uint64_t t_ = 0;
};

class AgingRandom final : public Scheduler {
 public:
  AgingRandom(uint32_t n, uint64_t bound, uint64_t seed)
      : n_(n), bound_(bound), rng_(seed), ages_(n, 0) {
    if (n == 0 || bound < 2 * uint64_t{n})
      throw std::invalid_argument(
          "aging scheduler: bound must be at least twice the key count");
  }
  Selector pick(uint64_t) override {
    const uint64_t threshold = bound_ - n_;
    Key k;
    const auto it = std::max_element(ages_.begin(), ages_.end());
    if (*it >= threshold) {
      k = static_cast<Key>(it - ages_.begin());  // least key wins ties
    } else {
      k = static_cast<Key>(rng_() % n_);
    }
    for (uint32_t j = 0; j < n_; ++j) ++ages_[j];
    ages_[k] = 0;
    return Selector::key(k);
  }
  std::string descriptor() const override {
    return "aging b=" + std::to_string(bound_);
  }
  uint64_t bound() const override { return bound_; }
  std::string fingerprint() const override {
    std::ostringstream os;
    os << rng_;
    uint64_t h = 1469598103934665603ull;
    for (const char c : os.str()) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    std::string fp;
    for (const uint64_t a : ages_) fp += std::to_string(a) + ",";
    return fp + "#" + std::to_string(h);
  }

 private:
  uint32_t n_;
  uint64_t bound_;
  std::mt19937_64 rng_;
  std::vector<uint64_t> ages_;
};

class Scripted final : public Scheduler {
 public:
  explicit Scripted(std::vector<Selector> script)
      : script_(std::move(script)) {}
  Selector pick(uint64_t i) override {
    if (i == 0 || i > script_.size())
      throw std::out_of_range("scripted scheduler: script exhausted");
    t_ = i;
    return script_[i - 1];
  }
  std::string descriptor() const override { return "script"; }
  uint64_t bound() const override { return 0; }
  std::string fingerprint() const override { return std::to_string(t_); }

 private:
  std::vector<Selector> script_;
  uint64_t t_ = 0;
};

}  // namespace

std::unique_ptr<Scheduler> make_round_robin(uint32_t nkeys) {
  return std::make_unique<RoundRobin>(nkeys);
}

std::unique_ptr<Scheduler> make_aging_random(uint32_t nkeys, uint64_t bound,
                                             uint64_t seed) {
  return std::make_unique<AgingRandom>(nkeys, bound, seed);
}

std::unique_ptr<Scheduler> make_scripted(std::vector<Selector> script) {
  return std::make_unique<Scripted>(std::move(script));
}

std::unique_ptr<Scheduler> scheduler_for_trace(const Trace& trace) {
  if (trace.sched == "rr") return make_round_robin(trace.nkeys);
  if (trace.sched.rfind("aging b=", 0) == 0)
    return make_aging_random(trace.nkeys, trace.bound,
                             derive_seed(trace.seed, 2));
  return nullptr;
}

Trace simulate(const System& sys, Scheduler& sched, uint64_t steps,
               uint64_t seed) {
  std::mt19937_64 succ_rng(derive_seed(seed, 1));
  Trace tr;
  tr.system = sys.name();
  tr.nkeys = sys.nkeys();
  tr.sched = sched.descriptor();
  tr.bound = sched.bound();
  tr.seed = seed;
  tr.states.reserve(steps + 1);
  tr.states.push_back(sys.initial_state());
  for (uint64_t i = 1; i <= steps; ++i) {
    const SystemState& x = tr.states.back();
    const Selector sel = sched.pick(i);
    tr.picks.push_back(sel);
    if (sel.is_stutter() || sys.blok(x, sel.key_value())) {
      tr.states.push_back(x);
      continue;
    }
    const Key k = sel.key_value();
    const auto succs = sys.succ_tstates(x.at(k), x);
    if (succs.empty())
      throw std::runtime_error("simulate: unblocked task has no successor");
    const size_t pickd = succs.size() == 1 ? 0 : succ_rng() % succs.size();
    tr.states.push_back(sys.with(x, k, succs[pickd]));
  }
  return tr;
}

CheckReport check_run_legal(const Trace& trace, const System& sys,
                            ExecPolicy policy) {
  CheckReport r;
  r.suite = "run-legal";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  r.states = trace.states.size();
  r.note = "finite prefix of length " + std::to_string(trace.steps());

  TheoremResult init;
  init.name = "run-init";
  init.cases = 1;
  if (!sys.init(trace.states.at(0))) {
    init.verdict = Verdict::Fail;
    init.cex = Counterexample{{{"state", sys.render_state(trace.states[0])}},
                              "first state does not satisfy sys_init"};
  }

  TheoremResult steps;
  steps.name = "run-steps";
  steps.cases = trace.steps();
  AtomicMin bad;
  par_for(trace.steps(), policy, [&](size_t t) {
    if (!sys.legal_step(trace.states[t], trace.states[t + 1], trace.picks[t]))
      bad.offer(t);
  });
  if (bad.hit()) {
    const size_t t = bad.get();
    steps.verdict = Verdict::Fail;
    const Selector sel = trace.picks[t];
    steps.cex = Counterexample{
        {{"index", std::to_string(t + 1)},
         {"pick", sel.is_stutter() ? "-" : sys.keys().name(sel.key_value())},
         {"x", sys.render_state(trace.states[t])},
         {"y", sys.render_state(trace.states[t + 1])}},
        "legal_step fails at this index"};
  }
  r.theorems = {std::move(init), std::move(steps)};
  return r;
}

FairWitness derive_fair_witness(const Trace& trace, uint64_t bound) {
  FairWitness w;
  w.bound = bound;
  const uint32_t n = trace.nkeys;
  w.max_gap.assign(n, 0);
  std::vector<size_t> last(n, 0);
  for (size_t i = 1; i <= trace.steps(); ++i) {
    for (Key k = 0; k < n; ++k) {
      const uint64_t gap = i - last[k];
      w.max_gap[k] = std::max(w.max_gap[k], gap);
      if (trace.picks[i - 1] == Selector::key(k)) {
        last[k] = i;
      } else if (gap > bound && w.ok) {
        w.ok = false;
        w.violation = {k, i};
      }
    }
  }
  return w;
}

Trace map_trace(const Trace& trace, const System& impl, const System& spec) {
  Trace out;
  out.system = spec.name();
  out.nkeys = trace.nkeys;
  out.sched = trace.sched;
  out.bound = trace.bound;
  out.seed = trace.seed;
  out.states.reserve(trace.states.size());
  for (const SystemState& x : trace.states)
    out.states.push_back(impl.map_state(x));
  for (size_t t = 0; t < trace.steps(); ++t) {
    out.picks.push_back(out.states[t] == out.states[t + 1]
                            ? Selector::stutter()
                            : trace.picks[t]);
  }
  return out;
}

CheckReport check_refinement_trace(const Trace& trace, const System& impl,
                                   const System& spec, ExecPolicy policy) {
  if (!impl.def().refinement)
    throw std::logic_error(impl.name() + ": no refinement bundle");
  const auto& rank = impl.def().refinement->t_rank;
  const Trace mapped = map_trace(trace, impl, spec);

  CheckReport r;
  r.suite = "refinement-trace";
  r.system = impl.name();
  r.nkeys = impl.nkeys();
  r.states = trace.states.size();

  TheoremResult legal, stutter, stable;
  legal.name = "spec-run-legal";
  stutter.name = "stutter-rank-decrease";
  stable.name = "rank-stable";
  AtomicMin bad_legal, bad_stutter, bad_stable;
  AtomicCount n_legal, n_stutter, n_stable;

  const uint32_t n = impl.nkeys();
  par_for(trace.steps(), policy, [&](size_t t) {
    const SystemState& x = trace.states[t];
    const SystemState& y = trace.states[t + 1];
    const SystemState& mx = mapped.states[t];
    const SystemState& my = mapped.states[t + 1];
    const Selector spick = mapped.picks[t];
    if (spick.is_stutter()) {
      // inside a spec stutter segment
      if (!trace.picks[t].is_stutter() && !(x == y)) {
        const Key k = trace.picks[t].key_value();
        n_stutter.add(1);
        if (!ord_lt(rank(y.at(k)), rank(x.at(k)))) bad_stutter.offer(t);
      }
    } else {
      const Key k = spick.key_value();
      n_legal.add(1);
      if (!spec.next_check(mx, my, k) || spec.blok(mx, k))
        bad_legal.offer(t);
    }
    if (!trace.picks[t].is_stutter()) {
      const Key k = trace.picks[t].key_value();
      for (Key l = 0; l < n; ++l) {
        if (l == k) continue;
        n_stable.add(1);
        if (!ord_le(rank(y.at(l)), rank(x.at(l))))
          bad_stable.offer((uint64_t{t} << 8) | l);
      }
    }
  });

  legal.cases = n_legal.get();
  stutter.cases = n_stutter.get();
  stable.cases = n_stable.get();
  auto state_items = [&](size_t t) {
    return std::vector<std::pair<std::string, std::string>>{
        {"index", std::to_string(t + 1)},
        {"x", impl.render_state(trace.states[t])},
        {"y", impl.render_state(trace.states[t + 1])}};
  };
  if (bad_legal.hit()) {
    const size_t t = bad_legal.get();
    legal.verdict = Verdict::Fail;
    auto items = state_items(t);
    items.push_back({"pick", trace.picks[t].is_stutter()
                                 ? "-"
                                 : impl.keys().name(
                                       trace.picks[t].key_value())});
    items.push_back({"mapped-x", spec.render_state(mapped.states[t])});
    items.push_back({"mapped-y", spec.render_state(mapped.states[t + 1])});
    legal.cex = Counterexample{
        std::move(items), "mapped step is not a legal unblocked spec step"};
  }
  if (bad_stutter.hit()) {
    const size_t t = bad_stutter.get();
    stutter.verdict = Verdict::Fail;
    auto items = state_items(t);
    items.push_back(
        {"key", impl.keys().name(trace.picks[t].key_value())});
    stutter.cex = Counterexample{
        std::move(items),
        "impl step with unchanged map does not decrease the key's rank"};
  }
  if (bad_stable.hit()) {
    const size_t t = static_cast<size_t>(bad_stable.get() >> 8);
    const Key l = static_cast<Key>(bad_stable.get() & 0xff);
    stable.verdict = Verdict::Fail;
    auto items = state_items(t);
    items.push_back({"key", impl.keys().name(l)});
    stable.cex = Counterexample{std::move(items),
                                "rank of an unselected key increased"};
  }

  // stutter segment statistics
  size_t segments = 0, longest = 0, cur = 0;
  for (size_t t = 0; t < mapped.steps(); ++t) {
    if (mapped.picks[t].is_stutter()) {
      if (++cur == 1) ++segments;
      longest = std::max(longest, cur);
    } else {
      cur = 0;
    }
  }
  r.note = "finite prefix; stutter segments=" + std::to_string(segments) +
           " longest=" + std::to_string(longest);
  r.theorems = {std::move(legal), std::move(stutter), std::move(stable)};
  return r;
}

bool StarvationFindings::any() const {
  for (const auto& k : keys)
    if (k.flagged || k.lasso) return true;
  return false;
}

StarvationFindings detect_starvation(const Trace& trace, const System& sys,
                                     std::optional<uint64_t> horizon) {
  const uint32_t n = trace.nkeys;
  const size_t steps = trace.steps();

  // intern canonical states; also the input to the default horizon
  std::unordered_map<uint64_t, std::vector<std::pair<uint32_t, size_t>>>
      canon_ids;
  std::vector<SystemState> canon_pool;
  std::vector<uint32_t> canon_of(steps + 1);
  for (size_t i = 0; i <= steps; ++i) {
    SystemState c = sys.canon(trace.states[i]);
    const uint64_t h = c.hash();
    auto& bucket = canon_ids[h];
    uint32_t id = UINT32_MAX;
    for (const auto& [cid, pidx] : bucket)
      if (canon_pool[pidx] == c) {
        id = cid;
        break;
      }
    if (id == UINT32_MAX) {
      id = static_cast<uint32_t>(canon_pool.size());
      bucket.push_back({id, canon_pool.size()});
      canon_pool.push_back(std::move(c));
    }
    canon_of[i] = id;
  }

  StarvationFindings f;
  f.horizon = horizon ? *horizon : 10 * uint64_t{n} * canon_pool.size();

  std::vector<std::vector<size_t>> events(n);
  for (size_t t = 0; t < steps; ++t) {
    if (!trace.picks[t].is_stutter() &&
        !(trace.states[t] == trace.states[t + 1]))
      events[trace.picks[t].key_value()].push_back(t + 1);
  }
  std::vector<std::vector<uint64_t>> progress_prefix(n);
  for (Key k = 0; k < n; ++k) {
    KeyFinding kf;
    kf.key = k;
    kf.progress_events = events[k].size();
    size_t prev = 0;
    for (const size_t e : events[k]) {
      kf.max_gap = std::max<uint64_t>(kf.max_gap, e - prev);
      prev = e;
    }
    kf.max_gap = std::max<uint64_t>(kf.max_gap, steps - prev);
    kf.flagged = kf.max_gap > f.horizon;
    f.keys.push_back(kf);

    auto& pp = progress_prefix[k];
    pp.assign(steps + 1, 0);
    size_t ei = 0;
    for (size_t i = 1; i <= steps; ++i) {
      pp[i] = pp[i - 1];
      if (ei < events[k].size() && events[k][ei] == i) {
        ++pp[i];
        ++ei;
      }
    }
  }

  // lasso upgrade: a repeated (canonical state, scheduler state) pair with
  // a deterministic loop and zero intervening progress
  auto sched = scheduler_for_trace(trace);
  if (sched) {
    // every step of the loop must be the unique legal outcome, otherwise
    // the repeated pair does not pin down the future
    auto loop_deterministic = [&](size_t j, size_t i) {
      for (size_t t = j; t < i; ++t) {
        const SystemState& x = trace.states[t];
        const SystemState& y = trace.states[t + 1];
        const Selector sel = trace.picks[t];
        if (sel.is_stutter() || sys.blok(x, sel.key_value())) {
          if (!(x == y)) return false;
          continue;
        }
        const auto succs = sys.succ_tstates(x.at(sel.key_value()), x);
        if (succs.size() != 1 ||
            !(y == sys.with(x, sel.key_value(), succs[0])))
          return false;
      }
      return true;
    };
    std::map<std::pair<uint32_t, std::string>, size_t> seen;
    seen[{canon_of[0], sched->fingerprint()}] = 0;
    for (size_t i = 1; i <= steps; ++i) {
      // a trace whose picks disagree with its declared scheduler cannot
      // support a lasso claim
      if (sched->pick(i) != trace.picks[i - 1]) break;
      const auto key = std::make_pair(canon_of[i], sched->fingerprint());
      const auto it = seen.find(key);
      if (it != seen.end()) {
        const size_t j = it->second;
        for (Key k = 0; k < n; ++k) {
          auto& kf = f.keys[k];
          if (kf.lasso) continue;
          if (progress_prefix[k][i] == progress_prefix[k][j] &&
              loop_deterministic(j, i)) {
            kf.lasso = true;
            kf.flagged = true;
            kf.lasso_start = j;
            kf.lasso_end = i;
          }
        }
      } else {
        seen.emplace(key, i);
      }
    }
  }
  return f;
}

CheckReport starvation_report(const StarvationFindings& f, const Trace& trace,
                              const System& sys) {
  CheckReport r;
  r.suite = "starvation";
  r.system = sys.name();
  r.nkeys = sys.nkeys();
  r.states = trace.states.size();
  r.note = "finite prefix; horizon=" + std::to_string(f.horizon);
  TheoremResult t;
  t.name = "no-starvation-findings";
  t.cases = f.keys.size();
  for (const auto& kf : f.keys) {
    if (!(kf.flagged || kf.lasso)) continue;
    t.verdict = Verdict::Fail;
    Counterexample cex;
    cex.items = {{"key", sys.keys().name(kf.key)},
                 {"progress-events", std::to_string(kf.progress_events)},
                 {"max-gap", std::to_string(kf.max_gap)}};
    if (kf.lasso) {
      cex.items.push_back({"lasso",
                           std::to_string(kf.lasso_start) + ".." +
                               std::to_string(kf.lasso_end)});
      cex.detail = "confirmed lasso with zero progress for this key";
    } else {
      cex.detail = "progress horizon exceeded (potential starvation)";
    }
    t.cex = std::move(cex);
    break;
  }
  r.theorems.push_back(std::move(t));
  return r;
}

}  // namespace fsr
