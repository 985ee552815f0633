#include "fsr/systems/bakery.hpp"

#include <algorithm>
#include <random>

#include "bakery_oracle.hpp"
#include "doctest.h"
#include "fsr/reachability.hpp"
#include "fsr/registry.hpp"
#include "util.hpp"

using namespace fsr;
using fsr_test::state_of;
using fsr_test::ts_of;
namespace oracle = fsr_test::bakery_oracle;

namespace {

const System& impl2() {
  static const System sys = make_system("bakery-impl", 2);
  return sys;
}

TState succ_of(const System& sys, TStateView a, const SystemState& x) {
  const auto succs = sys.succ_tstates(a, x);
  REQUIRE(succs.size() == 1);
  return succs[0];
}

}  // namespace

TEST_CASE("curr_sh_max") {
  const System& sys = impl2();
  CHECK(systems::curr_sh_max(sys.initial_state()) == 1);
  const SystemState x = state_of(sys, {ts_of(sys, 0, {{"sh_max", 1}}),
                                       ts_of(sys, 1, {{"sh_max", 3}})});
  CHECK(systems::curr_sh_max(x) == 3);
  const System none(sys.def_ptr(), 0);
  CHECK(systems::curr_sh_max(none.initial_state()) == 1);
}

TEST_CASE("ticket protocol branches") {
  const System& sys = impl2();
  const auto& schema = sys.def().schema;
  const SystemState x0 = sys.initial_state();

  // location 0 starts choosing
  CHECK(succ_of(sys, ts_of(sys, 0, {}), x0) ==
        ts_of(sys, 0, {{"loc", 1}, {"choosing", 1}}));

  // location 2 takes a ticket one above temp and remembers the old one
  CHECK(succ_of(sys, ts_of(sys, 0, {{"loc", 2}, {"temp", 4}, {"pos", 1}}),
                x0) ==
        ts_of(sys, 0,
              {{"loc", 3},
               {"temp", 4},
               {"pos", 5},
               {"old_pos", 1},
               {"pos_valid", 1}}));

  // location 3 publishes pos when the shared max did not move past temp
  const SystemState x = state_of(
      sys,
      {ts_of(sys, 0, {{"loc", 3}, {"temp", 4}, {"pos", 5}, {"sh_max", 4}}),
       ts_of(sys, 1, {{"sh_max", 2}})});
  TState s = succ_of(sys, x.at(0), x);
  CHECK(s[schema.index_of("sh_max")] == 5);
  CHECK(s[schema.index_of("loc")] == 4);

  // and keeps a larger shared max
  const SystemState y = state_of(
      sys,
      {ts_of(sys, 0, {{"loc", 3}, {"temp", 4}, {"pos", 5}, {"sh_max", 4}}),
       ts_of(sys, 1, {{"sh_max", 7}})});
  CHECK(succ_of(sys, y.at(0), y)[schema.index_of("sh_max")] == 7);

  // location 7 wraps around and withdraws the ticket
  const TState back =
      succ_of(sys, ts_of(sys, 0, {{"loc", 7}, {"pos_valid", 1}}), x0);
  CHECK(back[schema.index_of("loc")] == 0);
  CHECK(back[schema.index_of("pos_valid")] == 0);
}

TEST_CASE("blocking relation") {
  const System& sys = impl2();
  const auto& blok = sys.def().t_blok;
  CHECK(blok(ts_of(sys, 0, {{"loc", 5}}),
             ts_of(sys, 1, {{"loc", 2}, {"choosing", 1}})));
  // lex tie broken toward the smaller ndx
  CHECK_FALSE(blok(ts_of(sys, 0, {{"loc", 6}, {"pos", 3}}),
                   ts_of(sys, 1, {{"pos", 3}, {"pos_valid", 1}})));
  CHECK(blok(ts_of(sys, 1, {{"loc", 6}, {"pos", 3}}),
             ts_of(sys, 0, {{"pos", 3}, {"pos_valid", 1}})));
  CHECK_FALSE(blok(ts_of(sys, 0, {{"loc", 2}}),
                   ts_of(sys, 1, {{"loc", 6}, {"pos_valid", 1}})));
}

TEST_CASE("t_noblk") {
  const System& sys = impl2();
  const auto& noblk = sys.def().validity->t_noblk;
  CHECK(noblk(ts_of(sys, 0, {{"loc", 3}}), ts_of(sys, 1, {{"choosing", 1}})));
  CHECK(noblk(ts_of(sys, 0, {{"loc", 6}, {"pos", 2}}),
              ts_of(sys, 1, {{"pos", 5}})));
  CHECK_FALSE(noblk(ts_of(sys, 0, {{"loc", 5}}),
                    ts_of(sys, 1, {{"choosing", 1}, {"pos", 5}})));
  // the m1 mutant drops the choosing conjunct
  const auto m1 = systems::bakery_impl_m1();
  CHECK(m1.validity->t_noblk(ts_of(sys, 0, {{"loc", 5}, {"pos", 2}}),
                             ts_of(sys, 1, {{"choosing", 1}, {"pos", 5}})));
}

TEST_CASE("t_nstrv") {
  const System& sys = impl2();
  const auto& nstrv = sys.def().validity->t_nstrv;
  CHECK(nstrv(ts_of(sys, 0, {{"pos", 5}}),
              ts_of(sys, 1, {{"loc", 2}, {"temp", 1}})) == 14);
  CHECK(nstrv(ts_of(sys, 0, {{"pos", 5}}),
              ts_of(sys, 1, {{"loc", 5}, {"pos", 9}})) == 8);
  CHECK(nstrv(ts_of(sys, 0, {}), ts_of(sys, 1, {{"loc", 1}})) == 4);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    const TState a = ts_of(sys, 0,
                           {{"loc", static_cast<int64_t>(rng() % 8)},
                            {"pos", static_cast<int64_t>(rng() % 6)}});
    const TState b = ts_of(sys, 1,
                           {{"loc", static_cast<int64_t>(rng() % 8)},
                            {"pos", static_cast<int64_t>(rng() % 6)},
                            {"temp", static_cast<int64_t>(rng() % 6)}});
    CHECK(nstrv(a, b) >= 1);
  }
}

TEST_CASE("t_nlock") {
  const System& sys = impl2();
  const auto& nlock = sys.def().validity->t_nlock;
  const SystemState x =
      state_of(sys, {ts_of(sys, 0, {{"choosing", 1}, {"pos", 1}}),
                     ts_of(sys, 1, {{"pos", 1}})});
  CHECK(nlock(0, x) == make_ord(2, 1, make_ord(1, 2, 0)));
  CHECK(nlock(1, x) == make_ord(2, 2, make_ord(1, 2, 1)));
  CHECK(ord_lt(nlock(0, x), nlock(1, x)));
}

TEST_CASE("map and rank") {
  const System& sys = impl2();
  const auto& rb = *sys.def().refinement;
  const System spec = make_system("bakery-spec", 2);
  const auto& ss = spec.def().schema;
  auto spec_ts = [&](std::string_view loc, int64_t pos, int64_t load) {
    TState t(3, 0);
    const auto& labels = ss.fields()[ss.index_of("loc")].labels;
    t[ss.index_of("loc")] =
        std::find(labels.begin(), labels.end(), loc) - labels.begin();
    t[ss.index_of("pos")] = pos;
    t[ss.index_of("load")] = load;
    return t;
  };
  CHECK(rb.t_map(ts_of(sys, 0, {{"loc", 4}, {"pos", 5}})) ==
        spec_ts("interested", 5, 5));
  CHECK(rb.t_rank(ts_of(sys, 0, {{"loc", 4}})) == Ord(2));
  CHECK(rb.t_map(ts_of(sys, 0, {{"loc", 3}, {"pos", 5}, {"old_pos", 1}})) ==
        spec_ts("loaded", 1, 5));
  CHECK(rb.t_map(ts_of(sys, 0, {{"loc", 2}, {"temp", 4}, {"pos", 1}})) ==
        spec_ts("loaded", 1, 5));
  const uint64_t ranks[8] = {1, 0, 1, 0, 2, 1, 0, 0};
  for (int64_t loc = 0; loc < 8; ++loc)
    CHECK(rb.t_rank(ts_of(sys, 0, {{"loc", loc}})) ==
          Ord(ranks[static_cast<size_t>(loc)]));
}

TEST_CASE("spec system") {
  const System spec = make_system("bakery-spec", 2);
  const auto& ss = spec.def().schema;
  auto spec_ts = [&](int64_t loc, int64_t pos, int64_t load) {
    TState t(3, 0);
    t[ss.index_of("loc")] = loc;
    t[ss.index_of("pos")] = pos;
    t[ss.index_of("load")] = load;
    return t;
  };
  const int64_t idle = 0, loaded = 1, interested = 2, go = 3;
  const SystemState x =
      state_of(spec, {spec_ts(interested, 3, 3), spec_ts(idle, 1, 2)});
  CHECK(systems::spec_max_pos(x) == 3);
  CHECK(systems::spec_max_load(x) == 3);
  // interested -> go with all else unchanged
  CHECK(spec.next_check(x, spec.with(x, 0, spec_ts(go, 3, 3)), 0));
  CHECK_FALSE(spec.next_check(x, spec.with(x, 0, spec_ts(go, 4, 3)), 0));
  // idle -> loaded requires load strictly above every pos
  CHECK_FALSE(spec.next_check(x, spec.with(x, 1, spec_ts(loaded, 1, 3)), 1));
  CHECK(spec.next_check(x, spec.with(x, 1, spec_ts(loaded, 1, 4)), 1));
  CHECK_FALSE(spec.next_check(x, spec.with(x, 1, spec_ts(loaded, 2, 4)), 1));
  // blocking: a lower ticket or a task already in go
  CHECK(spec.def().t_blok(spec_ts(interested, 3, 3),
                          spec_ts(interested, 2, 2)));
  CHECK_FALSE(spec.def().t_blok(spec_ts(interested, 3, 3),
                                spec_ts(interested, 4, 4)));
  CHECK(spec.def().t_blok(spec_ts(interested, 3, 3), spec_ts(go, 9, 9)));
  CHECK_FALSE(spec.def().t_blok(spec_ts(idle, 0, 0), spec_ts(go, 9, 9)));
  CHECK(spec.init(spec.initial_state()));
}

TEST_CASE("canonicalization preserves the module predicates") {
  const System& sys = impl2();
  const auto& vb = *sys.def().validity;
  const auto& rb = *sys.def().refinement;
  const StateGraph g = explore(sys, {});
  REQUIRE(g.complete());
  std::mt19937_64 rng(13);
  const auto& schema = sys.def().schema;
  const size_t shift_fields[] = {schema.index_of("pos"),
                                 schema.index_of("old_pos"),
                                 schema.index_of("temp"),
                                 schema.index_of("sh_max")};
  for (int trial = 0; trial < 300; ++trial) {
    const SystemState& x = g.state(rng() % g.num_states());
    const int64_t d = 1 + static_cast<int64_t>(rng() % 9);
    SystemState shifted = x;
    for (Key k = 0; k < 2; ++k) {
      TState ts(x.at(k).begin(), x.at(k).end());
      for (const size_t f : shift_fields) ts[f] += d;
      shifted.set(k, ts);
    }
    CHECK(sys.canon(shifted) == x);  // common shifts cancel
    for (Key k = 0; k < 2; ++k) {
      for (Key l = 0; l < 2; ++l) {
        CHECK(sys.def().t_blok(x.at(k), x.at(l)) ==
              sys.def().t_blok(shifted.at(k), shifted.at(l)));
        CHECK(vb.t_noblk(x.at(k), x.at(l)) ==
              vb.t_noblk(shifted.at(k), shifted.at(l)));
        CHECK(vb.t_nstrv(x.at(k), x.at(l)) ==
              vb.t_nstrv(shifted.at(k), shifted.at(l)));
        CHECK(ord_lt(vb.t_nlock(k, x), vb.t_nlock(l, x)) ==
              ord_lt(vb.t_nlock(k, shifted), vb.t_nlock(l, shifted)));
      }
      CHECK(rb.t_rank(x.at(k)) == rb.t_rank(shifted.at(k)));
      const TState cx = succ_of(sys, x.at(k), x);
      const TState cs = succ_of(sys, shifted.at(k), shifted);
      CHECK(tstate_eq(rb.t_map(x.at(k)), rb.t_map(cx)) ==
            tstate_eq(rb.t_map(shifted.at(k)), rb.t_map(cs)));
    }
  }
}

TEST_CASE("enumerator agrees with the relational check") {
  const System& sys = impl2();
  const StateGraph g = explore(sys, {});
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const SystemState& x = g.state(rng() % g.num_states());
    const Key k = static_cast<Key>(rng() % 2);
    const auto succs = sys.succ_tstates(x.at(k), x);
    REQUIRE(succs.size() == 1);  // the protocol is deterministic
    CHECK(sys.def().t_next_check(x.at(k), succs[0], x));
    TState cand = succs[0];
    const size_t f = rng() % cand.size();
    cand[f] += 1 + static_cast<int64_t>(rng() % 3);
    CHECK(sys.def().t_next_check(x.at(k), cand, x) ==
          tstate_eq(cand, succs[0]));
  }
}

TEST_CASE("agrees with the straight-line oracle interpreter") {
  const System& sys = impl2();
  const auto& schema = sys.def().schema;
  oracle::St ox = {oracle::init_ts(0), oracle::init_ts(1)};
  std::mt19937_64 rng(23);
  for (int step = 0; step < 2000; ++step) {
    SystemState x = sys.initial_state();
    for (Key k = 0; k < 2; ++k) x.set(k, oracle::to_tstate(schema, ox[k]));
    for (size_t k = 0; k < 2; ++k) {
      CHECK(sys.blok(x, static_cast<Key>(k)) == oracle::blocked(ox, k));
      if (!oracle::blocked(ox, k)) {
        const auto succs = sys.succ_tstates(x.at(static_cast<Key>(k)), x);
        CHECK(tstate_eq(succs.at(0),
                        oracle::to_tstate(schema, oracle::t_next(ox[k], ox))));
      }
    }
    const size_t k = rng() % 2;
    if (!oracle::blocked(ox, k)) ox[k] = oracle::t_next(ox[k], ox);
  }
}
