#include "fsr/measures.hpp"

#include "doctest.h"
#include "fsr/reachability.hpp"
#include "fsr/registry.hpp"
#include "fsr/run_engine.hpp"
#include "util.hpp"

using namespace fsr;
using fsr_test::state_of;
using fsr_test::ts_of;

namespace {

// three tasks with strictly layered tickets: A waits on B waits on C
SystemState chain_state(const System& sys) {
  return state_of(
      sys,
      {ts_of(sys, 0, {{"loc", 6}, {"pos", 3}, {"pos_valid", 1}}),
       ts_of(sys, 1, {{"loc", 6}, {"pos", 2}, {"pos_valid", 1}}),
       ts_of(sys, 2, {{"loc", 3}, {"pos", 1}, {"pos_valid", 1}})});
}

}  // namespace

TEST_CASE("sys_noblk") {
  const System sys = make_system("bakery-impl", 2);
  const SystemState x =
      state_of(sys, {ts_of(sys, 0, {{"loc", 3}}),
                     ts_of(sys, 1, {{"loc", 2}, {"choosing", 1}})});
  CHECK(sys_noblk(0, x, sys));
  const SystemState y =
      state_of(sys, {ts_of(sys, 0, {{"loc", 5}}),
                     ts_of(sys, 1, {{"loc", 2}, {"choosing", 1}})});
  CHECK_FALSE(sys_noblk(0, y, sys));
  const System none(sys.def_ptr(), 0);
  CHECK(sys_noblk(0, none.initial_state(), none) == true);
}

TEST_CASE("pikblk") {
  const System sys = make_system("bakery-impl", 3);
  const SystemState x = chain_state(sys);
  CHECK(pikblk(0, x, sys) == Key{1});  // least blocking key wins
  CHECK(pikblk(1, x, sys) == Key{2});
  CHECK_THROWS_AS(pikblk(2, x, sys), std::invalid_argument);
}

TEST_CASE("starver walks the pikblk chain") {
  const System sys = make_system("bakery-impl", 3);
  const SystemState x = chain_state(sys);
  CHECK(starver(2, x, sys) == Key{2});  // unblocked key is its own starver
  CHECK(starver(1, x, sys) == Key{2});
  CHECK(starver(0, x, sys) == Key{2});
  const auto trace = starver_trace(0, x, sys);
  REQUIRE(trace.size() == 3);
  CHECK(trace[0].key == 0);
  CHECK(trace[0].blocked);
  CHECK(trace[1].key == 1);
  CHECK(trace[1].blocked);
  CHECK(trace[2].key == 2);
  CHECK_FALSE(trace[2].blocked);
  CHECK_FALSE(sys.blok(x, starver(0, x, sys)));
}

TEST_CASE("pikblk cycles become a diagnosable error") {
  const System sys = make_system("relay-m3", 2);
  const SystemState dead = state_of(sys, {TState{1}, TState{2}});
  REQUIRE(sys.blok(dead, 0));
  REQUIRE(sys.blok(dead, 1));
  CHECK_THROWS_AS(starver(0, dead, sys), PikblkCycleError);
  try {
    starver_trace(1, dead, sys);
    FAIL("expected a pikblk cycle");
  } catch (const PikblkCycleError& e) {
    CHECK(e.chain().size() >= 2);
  }
}

TEST_CASE("sum_nsts") {
  // a one-field system with prescribed measures: peers at 7 may block and
  // cost 8, everything else is settled
  TaskSystemDef def;
  def.name = "toy";
  def.schema = TStateSchema({{"v", FieldKind::Nat, {}}});
  def.initial = [](Key, const KeySet&) { return TState{0}; };
  def.t_init = [](TStateView a, Key, const KeySet&) { return a[0] == 0; };
  def.t_next_check = [](TStateView, TStateView, const SystemState&) {
    return false;
  };
  def.t_blok = [](TStateView, TStateView b) { return b[0] == 7; };
  def.validity = ValidityBundle{
      [](TStateView, TStateView b) { return b[0] != 7; },
      [](TStateView, TStateView) { return uint64_t{8}; },
      [](Key, const SystemState&) { return Ord(0); },
  };
  auto defp = std::make_shared<TaskSystemDef>(std::move(def));

  const System two(defp, 2);
  CHECK(sum_nsts(0, state_of(two, {TState{0}, TState{1}}), two) == 1);
  CHECK(sum_nsts(0, state_of(two, {TState{0}, TState{7}}), two) == 9);
  const System none(defp, 0);
  CHECK(sum_nsts(0, none.initial_state(), none) == 1);
}

TEST_CASE("nstrvs_list and sys_nstrv") {
  const System sys = make_system("bakery-impl", 3);
  const SystemState x = chain_state(sys);
  const auto unblocked = nstrvs_list(2, x, sys);
  CHECK(unblocked.size() == 1);
  CHECK(unblocked[0] == sum_nsts(2, x, sys));
  const auto mid = nstrvs_list(1, x, sys);
  CHECK(mid.size() == 2);
  const auto full = nstrvs_list(0, x, sys);
  CHECK(full.size() == 3);
  CHECK(sys_nstrv(0, x, sys) ==
        nats_to_ord(3, std::span<const uint64_t>(full)));
  // the chain can never be longer than the key count
  const StateGraph g = explore(make_system("bakery-impl", 2), {});
  const System sys2 = make_system("bakery-impl", 2);
  for (uint32_t id = 0; id < g.num_states(); ++id)
    for (Key k = 0; k < 2; ++k)
      CHECK(nstrvs_list(k, g.state(id), sys2).size() <= 2);
}

TEST_CASE("prog_measure on hand-built traces") {
  const System sys = make_system("relay", 2);
  Trace tr;
  tr.system = "relay";
  tr.nkeys = 2;
  const SystemState s0 = state_of(sys, {TState{0}, TState{0}});
  const SystemState s1 = state_of(sys, {TState{1}, TState{0}});
  const SystemState s2 = state_of(sys, {TState{1}, TState{1}});
  tr.states = {s0, s1, s2, s2};
  tr.picks = {Selector::key(0), Selector::key(1), Selector::key(0)};

  // pick(1) = A and the state changes, so prog(A, 0) = 0
  CHECK(prog_measure(tr, 0, 0, 100).value == 0);
  CHECK(prog_measure(tr, 0, 0, 100).found());
  // from index 1 the next change for A never comes: step 3 picks A but
  // repeats the state
  CHECK(prog_measure(tr, 0, 1, 100).status ==
        ProgResult::Status::EndOfTrace);
  // B progresses at step 2
  CHECK(prog_measure(tr, 1, 0, 100).value == 1);
  // ill-formed key
  CHECK(prog_measure(tr, 9, 0, 100).value == 0);
  CHECK(prog_measure(tr, 9, 0, 100).found());
  // horizon cutoff
  CHECK(prog_measure(tr, 0, 1, 0).status ==
        ProgResult::Status::HorizonExceeded);
}

TEST_CASE("prog_measure decreases while a key waits") {
  const System sys = make_system("bakery-impl", 2);
  auto sched = make_round_robin(2);
  const Trace tr = simulate(sys, *sched, 60, 1);
  for (Key k = 0; k < 2; ++k) {
    for (size_t i = 1; i + 1 < tr.steps(); ++i) {
      const bool progressed = tr.picks[i - 1] == Selector::key(k) &&
                              !(tr.states[i] == tr.states[i - 1]);
      const auto now = prog_measure(tr, k, i, 1000);
      const auto before = prog_measure(tr, k, i - 1, 1000);
      if (!progressed && now.found() && before.found())
        CHECK(now.value < before.value);
      if (progressed && before.found()) CHECK(before.value == 0);
    }
  }
}
