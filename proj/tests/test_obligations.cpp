#include "fsr/obligations.hpp"

#include <sstream>

#include "doctest.h"
#include "fsr/registry.hpp"
#include "json.hpp"
#include "util.hpp"

using namespace fsr;

namespace {

const StateGraph& bakery2_graph() {
  static const StateGraph g = explore(make_system("bakery-impl", 2), {});
  return g;
}

std::string jsonl_of(const CheckReport& r) {
  std::ostringstream os;
  append_jsonl(os, r);
  return os.str();
}

void check_replay(const CheckReport& r, const System& sys,
                  const System* spec) {
  for (const auto& t : r.theorems) {
    if (t.verdict != Verdict::Fail) continue;
    REQUIRE(t.cex.has_value());
    CHECK_FALSE(replay_counterexample(sys, spec, t.name, *t.cex));
  }
}

}  // namespace

TEST_CASE("bakery passes every suite on the complete 2-key graph") {
  const System sys = make_system("bakery-impl", 2);
  const System spec = make_system("bakery-spec", 2);
  const StateGraph& g = bakery2_graph();
  REQUIRE(g.complete());

  const CheckReport props = check_system_props(g, sys);
  const CheckReport valid = check_valid_task_obligations(g, sys);
  const CheckReport match = check_match_obligations(g, sys, spec);
  const CheckReport derived = check_derived_system_obligations(g, sys);
  const CheckReport invs = check_state_invariants(g, sys);
  for (const CheckReport* r : {&props, &valid, &match, &derived, &invs}) {
    CHECK(r->all_pass());
    CHECK_FALSE(r->qualified);
    CHECK(r->states == 1014);
  }
  // the cross-validation of the task-level reduction: both the task-level
  // and the derived system-level suites pass together
  CHECK(valid.all_pass() == derived.all_pass());
}

TEST_CASE("serial and parallel kernels report identically") {
  const System sys = make_system("bakery-impl", 2);
  const System spec = make_system("bakery-spec", 2);
  const StateGraph& g = bakery2_graph();
  CHECK(jsonl_of(check_system_props(g, sys, ExecPolicy::Serial)) ==
        jsonl_of(check_system_props(g, sys, ExecPolicy::Parallel)));
  CHECK(jsonl_of(check_valid_task_obligations(g, sys, ExecPolicy::Serial)) ==
        jsonl_of(check_valid_task_obligations(g, sys, ExecPolicy::Parallel)));
  CHECK(jsonl_of(check_match_obligations(g, sys, spec, ExecPolicy::Serial)) ==
        jsonl_of(check_match_obligations(g, sys, spec,
                                         ExecPolicy::Parallel)));
  CHECK(
      jsonl_of(check_derived_system_obligations(g, sys, ExecPolicy::Serial)) ==
      jsonl_of(check_derived_system_obligations(g, sys,
                                                ExecPolicy::Parallel)));
  // and on a failing system the least-indexed witness is stable
  const System m1 = make_system("bakery-impl-m1", 2);
  CHECK(jsonl_of(check_valid_task_obligations(g, m1, ExecPolicy::Serial)) ==
        jsonl_of(check_valid_task_obligations(g, m1, ExecPolicy::Parallel)));
}

TEST_CASE("weakened t_noblk fails the valid-task suite with a replayable witness") {
  const System m1 = make_system("bakery-impl-m1", 2);
  const StateGraph g = explore(m1, {});
  const CheckReport r = check_valid_task_obligations(g, m1);
  CHECK_FALSE(r.all_pass());
  const TheoremResult* t = r.find("t-noblk-blk");
  REQUIRE(t != nullptr);
  CHECK(t->verdict == Verdict::Fail);
  check_replay(r, m1, nullptr);
  // the genuine definition holds on the very same witness
  const System good = make_system("bakery-impl", 2);
  CHECK(replay_counterexample(good, nullptr, "t-noblk-blk", *t->cex));
  // untouched suites still pass
  CHECK(check_system_props(g, m1).all_pass());
  CHECK(check_match_obligations(g, m1, make_system("bakery-spec", 2))
            .all_pass());
  CHECK(check_state_invariants(g, m1).all_pass());
  CHECK_FALSE(check_derived_system_obligations(g, m1).all_pass());
}

TEST_CASE("zero rank fails only the match suite") {
  const System m2 = make_system("bakery-impl-m2", 2);
  const System spec = make_system("bakery-spec", 2);
  const StateGraph g = explore(m2, {});
  const CheckReport match = check_match_obligations(g, m2, spec);
  CHECK_FALSE(match.all_pass());
  const TheoremResult* t = match.find("map-finite-stutter");
  REQUIRE(t != nullptr);
  CHECK(t->verdict == Verdict::Fail);
  CHECK(match.find("map-matches-next")->verdict == Verdict::Pass);
  check_replay(match, m2, &spec);
  CHECK(check_valid_task_obligations(g, m2).all_pass());
  CHECK(check_derived_system_obligations(g, m2).all_pass());
  CHECK(check_system_props(g, m2).all_pass());
}

TEST_CASE("symmetric blocking fails t-nlock-decreases and the starver") {
  const System m3 = make_system("relay-m3", 2);
  const StateGraph g = explore(m3, {});
  REQUIRE(g.complete());
  const CheckReport valid = check_valid_task_obligations(g, m3);
  CHECK_FALSE(valid.all_pass());
  CHECK(valid.find("t-nlock-decreases")->verdict == Verdict::Fail);
  check_replay(valid, m3, nullptr);
  const CheckReport derived = check_derived_system_obligations(g, m3);
  CHECK_FALSE(derived.all_pass());
  CHECK(derived.find("starver-terminates")->verdict == Verdict::Fail);
  check_replay(derived, m3, nullptr);
  CHECK(check_system_props(g, m3).all_pass());
}

TEST_CASE("relay passes system props") {
  const System relay = make_system("relay", 2);
  const StateGraph g = explore(relay, {});
  REQUIRE(g.complete());
  CHECK(check_system_props(g, relay).all_pass());
}

TEST_CASE("structured reports are line-delimited schema-tagged records") {
  const System sys = make_system("bakery-impl-m1", 2);
  const StateGraph g = explore(sys, {});
  const CheckReport r = check_valid_task_obligations(g, sys);
  std::istringstream lines(jsonl_of(r));
  std::string line;
  size_t n = 0;
  bool saw_cex = false;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("schema") == "fsr.verdict.v1");
    CHECK(j.at("suite") == "valid-task");
    CHECK(j.contains("theorem"));
    CHECK(j.contains("verdict"));
    saw_cex |= j.contains("counterexample");
    ++n;
  }
  CHECK(n == r.theorems.size());
  CHECK(saw_cex);
}

TEST_CASE("planted self-loop fails system props") {
  TaskSystemDef def;
  def.name = "selfloop";
  def.schema = TStateSchema({{"v", FieldKind::Nat, {}}});
  def.initial = [](Key, const KeySet&) { return TState{0}; };
  def.t_init = [](TStateView a, Key, const KeySet&) { return a[0] == 0; };
  def.t_next_enum = [](TStateView a, const SystemState&) {
    return std::vector<TState>{TState(a.begin(), a.end())};
  };
  def.t_next_check = [](TStateView a, TStateView b, const SystemState&) {
    return tstate_eq(a, b);
  };
  def.t_blok = [](TStateView, TStateView) { return false; };
  const System sys(std::make_shared<TaskSystemDef>(std::move(def)), 2);
  const StateGraph g = explore(sys, {});
  const CheckReport r = check_system_props(g, sys);
  CHECK_FALSE(r.all_pass());
  const TheoremResult* t = r.find("no-self-next");
  REQUIRE(t->cex.has_value());
  CHECK_FALSE(replay_counterexample(sys, nullptr, "no-self-next", *t->cex));
}

TEST_CASE("user invariants") {
  const System sys = make_system("bakery-impl", 1);
  const StateGraph g = explore(sys, {});
  StateInvariant at_zero{"always-at-loc-0",
                         [&](const SystemState& x, const KeySet&) {
                           return x.at(0)[sys.def().schema.index_of("loc")] ==
                                  0;
                         }};
  const CheckReport r = check_state_invariant(g, sys, at_zero);
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.theorems[0].cex.has_value());
  StateInvariant vacuous{"always-true",
                         [](const SystemState&, const KeySet&) {
                           return true;
                         }};
  CHECK(check_state_invariant(g, sys, vacuous).all_pass());
}

TEST_CASE("bounded graphs still pass, qualified") {
  const System sys = make_system("bakery-impl", 2);
  ExploreOptions opts;
  opts.depth = 5;
  const StateGraph g = explore(sys, opts);
  REQUIRE_FALSE(g.complete());
  const CheckReport r = check_valid_task_obligations(g, sys);
  CHECK(r.all_pass());  // no spurious failures on prefixes
  CHECK(r.qualified);
}

TEST_CASE("blocking domain is derived from the 1-key closure") {
  const System sys = make_system("bakery-impl", 2);
  const auto domain = blocking_domain(sys);
  CHECK(domain.size() == 8);  // one canonical t-state per location
  const System relay = make_system("relay", 2);
  CHECK(blocking_domain(relay).size() == 3);  // declared domain
}

TEST_CASE("bakery has no blocking cycles up to length 4") {
  const System sys = make_system("bakery-impl", 2);
  const CycleSearchResult res = run_cycle_search(sys, 4, {});
  CHECK(res.cycles.empty());
  CHECK(res.summary.all_pass());
  CHECK_FALSE(res.any_reachable);
}

TEST_CASE("relay has no blocking cycles") {
  const CycleSearchResult res =
      run_cycle_search(make_system("relay", 2), 4, {});
  CHECK(res.cycles.empty());
  CHECK(res.summary.all_pass());
}

TEST_CASE("symmetric blocking yields one reachable 2-cycle") {
  const System m3 = make_system("relay-m3", 2);
  const CycleSearchResult res = run_cycle_search(m3, 4, {});
  REQUIRE(res.cycles.size() == 1);
  CHECK(res.cycles[0].tstates.size() == 2);
  CHECK(res.any_reachable);
  REQUIRE(res.reachability.size() == 1);
  const TheoremResult& t = res.reachability[0].theorems.at(0);
  CHECK(t.verdict == Verdict::Fail);
  REQUIRE(t.cex.has_value());
  // replay the realization on the 2-key instance
  CHECK_FALSE(
      replay_counterexample(m3, nullptr, "cycle-unreachable", *t.cex));
}
