#include "fsr/systems/bakery.hpp"

#include <array>
#include <cassert>

namespace fsr::systems {

namespace {

// Field indices in the sorted impl schema.
struct ImplFields {
  size_t choosing, id, loc, old_pos, pos, pos_valid, sh_max, temp;
};

TStateSchema impl_schema() {
  return TStateSchema({
      {"choosing", FieldKind::Bool, {}},
      {"id", FieldKind::KeyName, {}},
      {"loc", FieldKind::Nat, {}},
      {"old_pos", FieldKind::Nat, {}},
      {"pos", FieldKind::Nat, {}},
      {"pos_valid", FieldKind::Bool, {}},
      {"sh_max", FieldKind::Nat, {}},
      {"temp", FieldKind::Nat, {}},
  });
}

const ImplFields& F() {
  static const ImplFields f = [] {
    const TStateSchema s = impl_schema();
    return ImplFields{s.index_of("choosing"), s.index_of("id"),
                      s.index_of("loc"),      s.index_of("old_pos"),
                      s.index_of("pos"),      s.index_of("pos_valid"),
                      s.index_of("sh_max"),   s.index_of("temp")};
  }();
  return f;
}

enum SpecLoc : int64_t { kIdle = 0, kLoaded = 1, kInterested = 2, kGo = 3 };

struct SpecFields {
  size_t load, loc, pos;
};

TStateSchema spec_schema() {
  return TStateSchema({
      {"load", FieldKind::Nat, {}},
      {"loc", FieldKind::Enum, {"idle", "loaded", "interested", "go"}},
      {"pos", FieldKind::Nat, {}},
  });
}

const SpecFields& S() {
  static const SpecFields f = [] {
    const TStateSchema s = spec_schema();
    return SpecFields{s.index_of("load"), s.index_of("loc"),
                      s.index_of("pos")};
  }();
  return f;
}

bool lex_lt(int64_t p1, int64_t n1, int64_t p2, int64_t n2) {
  return p1 < p2 || (p1 == p2 && n1 < n2);
}

TState impl_initial(Key k, const KeySet&) {
  TState a(8, 0);
  a[F().id] = k;
  a[F().loc] = 0;
  a[F().pos] = 1;
  a[F().old_pos] = 0;
  a[F().temp] = 0;
  a[F().sh_max] = 1;
  return a;
}

// The single successor of t-state a in system state x (Fig. 6 case split).
TState impl_succ(TStateView a, const SystemState& x) {
  const ImplFields& f = F();
  TState b(a.begin(), a.end());
  switch (a[f.loc]) {
    case 0:
      b[f.loc] = 1;
      b[f.choosing] = 1;
      break;
    case 1:
      b[f.loc] = 2;
      b[f.temp] = curr_sh_max(x);
      break;
    case 2:
      b[f.loc] = 3;
      b[f.pos] = a[f.temp] + 1;
      b[f.old_pos] = a[f.pos];
      b[f.pos_valid] = 1;
      break;
    case 3: {
      // compare-and-swap: keep a larger published max, else publish pos
      const int64_t cur = curr_sh_max(x);
      b[f.loc] = 4;
      b[f.sh_max] = cur > a[f.temp] ? cur : a[f.pos];
      break;
    }
    case 4:
      b[f.loc] = 5;
      b[f.choosing] = 0;
      break;
    case 5:
      b[f.loc] = 6;
      break;
    case 6:
      b[f.loc] = 7;
      break;
    default:
      b[f.loc] = 0;
      b[f.pos_valid] = 0;
      break;
  }
  return b;
}

bool impl_blok(TStateView a, TStateView b) {
  const ImplFields& f = F();
  if (a[f.loc] == 5) return b[f.choosing] != 0;
  if (a[f.loc] == 6)
    return b[f.pos_valid] != 0 &&
           lex_lt(b[f.pos], b[f.id], a[f.pos], a[f.id]);
  return false;
}

bool impl_noblk(TStateView a, TStateView b) {
  const ImplFields& f = F();
  return (a[f.loc] != 5 && a[f.loc] != 6) ||
         (b[f.choosing] == 0 && b[f.pos] > a[f.pos]);
}

bool impl_noblk_m1(TStateView a, TStateView b) {
  const ImplFields& f = F();
  return (a[f.loc] != 5 && a[f.loc] != 6) || b[f.pos] > a[f.pos];
}

uint64_t pos_fix(int64_t v) { return v < 1 ? 1 : static_cast<uint64_t>(v); }

uint64_t impl_nstrv(TStateView a, TStateView b) {
  const ImplFields& f = F();
  const int64_t loc = b[f.loc];
  if ((loc == 2 && b[f.temp] < a[f.pos]) || (loc > 2 && b[f.pos] <= a[f.pos]))
    return pos_fix(8 + (8 - loc));
  if (loc >= 5) return pos_fix(5 + (8 - loc));
  return pos_fix(5 - loc);
}

Ord impl_nlock(Key k, const SystemState& x) {
  const ImplFields& f = F();
  const TStateView a = x.at(k);
  const uint64_t pos = a[f.pos] < 0 ? 0 : static_cast<uint64_t>(a[f.pos]);
  return make_ord(2, a[f.choosing] ? 1 : 2,
                  make_ord(1, 1 + pos, Ord(static_cast<uint64_t>(a[f.id]))));
}

TState impl_map(TStateView a) {
  const ImplFields& f = F();
  const SpecFields& s = S();
  const int64_t loc = a[f.loc];
  TState m(3, 0);
  m[s.loc] = loc <= 1 ? kIdle
             : loc <= 3 ? kLoaded
             : loc <= 6 ? kInterested
                        : kGo;
  m[s.pos] = loc == 3 ? a[f.old_pos] : a[f.pos];
  m[s.load] = loc == 2 ? 1 + a[f.temp] : a[f.pos];
  return m;
}

Ord impl_rank(TStateView a) {
  static constexpr std::array<uint64_t, 8> table = {1, 0, 1, 0, 2, 1, 0, 0};
  return Ord(table[static_cast<size_t>(a[F().loc])]);
}

SystemState impl_canon(const SystemState& x) {
  const std::array<size_t, 4> fields = {F().old_pos, F().pos, F().sh_max,
                                        F().temp};
  return rebase_compress(x, fields, 2);
}

std::vector<StateInvariant> impl_invariants() {
  return {
      {"mutex-loc7",
       [](const SystemState& x, const KeySet& keys) {
         int in_cs = 0;
         for (Key k = 0; k < keys.size(); ++k)
           in_cs += x.at(k)[F().loc] == 7;
         return in_cs <= 1;
       }},
      {"choosing-at-locs-1-4",
       [](const SystemState& x, const KeySet& keys) {
         for (Key k = 0; k < keys.size(); ++k) {
           const TStateView a = x.at(k);
           const bool expect = a[F().loc] >= 1 && a[F().loc] <= 4;
           if ((a[F().choosing] != 0) != expect) return false;
         }
         return true;
       }},
  };
}

TaskSystemDef impl_base() {
  TaskSystemDef def;
  def.name = "bakery-impl";
  def.schema = impl_schema();
  def.initial = impl_initial;
  def.t_init = [](TStateView a, Key k, const KeySet& keys) {
    return tstate_eq(a, impl_initial(k, keys));
  };
  def.t_next_enum = [](TStateView a, const SystemState& x) {
    return std::vector<TState>{impl_succ(a, x)};
  };
  def.t_next_check = [](TStateView a, TStateView b, const SystemState& x) {
    return tstate_eq(b, impl_succ(a, x));
  };
  def.t_blok = impl_blok;
  def.canon = impl_canon;
  def.validity = ValidityBundle{impl_noblk, impl_nstrv, impl_nlock};
  def.refinement = RefinementBundle{"bakery-spec", impl_map, impl_rank};
  def.invariants = impl_invariants();
  return def;
}

bool spec_next_check(TStateView a, TStateView b, const SystemState& x) {
  const SpecFields& s = S();
  auto upd = [&](int64_t loc, int64_t pos) {
    TState t(a.begin(), a.end());
    t[s.loc] = loc;
    t[s.pos] = pos;
    return t;
  };
  switch (a[s.loc]) {
    case kIdle:
      return b[s.loc] == kLoaded && b[s.pos] == a[s.pos] && b[s.load] >= 0 &&
             b[s.load] > spec_max_pos(x) && b[s.load] >= spec_max_load(x);
    case kLoaded:
      return tstate_eq(b, upd(kInterested, a[s.load]));
    case kInterested:
      return tstate_eq(b, upd(kGo, a[s.pos]));
    default:
      return tstate_eq(b, upd(kIdle, a[s.pos]));
  }
}

bool spec_blok(TStateView a, TStateView b) {
  const SpecFields& s = S();
  return a[s.loc] == kInterested &&
         (b[s.loc] == kGo ||
          (b[s.loc] == kInterested && b[s.pos] < a[s.pos]));
}

}  // namespace

int64_t curr_sh_max(const SystemState& x) {
  int64_t m = 1;
  for (Key k = 0; k < x.nkeys(); ++k) m = std::max(m, x.at(k)[F().sh_max]);
  return m;
}

int64_t spec_max_pos(const SystemState& x) {
  int64_t m = 0;
  for (Key k = 0; k < x.nkeys(); ++k) m = std::max(m, x.at(k)[S().pos]);
  return m;
}

int64_t spec_max_load(const SystemState& x) {
  int64_t m = 0;
  for (Key k = 0; k < x.nkeys(); ++k) m = std::max(m, x.at(k)[S().load]);
  return m;
}

TaskSystemDef bakery_impl() { return impl_base(); }

TaskSystemDef bakery_impl_m1() {
  TaskSystemDef def = impl_base();
  def.name = "bakery-impl-m1";
  def.validity->t_noblk = impl_noblk_m1;
  return def;
}

TaskSystemDef bakery_impl_m2() {
  TaskSystemDef def = impl_base();
  def.name = "bakery-impl-m2";
  def.refinement->t_rank = [](TStateView) { return Ord(0); };
  return def;
}

TaskSystemDef bakery_spec() {
  TaskSystemDef def;
  def.name = "bakery-spec";
  def.schema = spec_schema();
  def.initial = [](Key, const KeySet&) {
    TState a(3, 0);
    a[S().loc] = kIdle;
    return a;
  };
  def.t_init = [](TStateView a, Key, const KeySet&) {
    return a[S().loc] == kIdle && a[S().pos] == 0 && a[S().load] == 0;
  };
  // idle -> loaded admits any fresh load, so no enumerator
  def.t_next_check = spec_next_check;
  def.t_blok = spec_blok;
  def.canon = [](const SystemState& x) {
    const std::array<size_t, 2> fields = {S().load, S().pos};
    return rebase_compress(x, fields, 2);
  };
  def.invariants = {
      {"mutex-go",
       [](const SystemState& x, const KeySet& keys) {
         int going = 0;
         for (Key k = 0; k < keys.size(); ++k) going += x.at(k)[S().loc] == kGo;
         return going <= 1;
       }},
  };
  return def;
}

}  // namespace fsr::systems
