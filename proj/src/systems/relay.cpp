#include "fsr/systems/relay.hpp"

namespace fsr::systems {

namespace {

TaskSystemDef relay_base() {
  TaskSystemDef def;
  def.name = "relay";
  def.schema = TStateSchema({{"loc", FieldKind::Nat, {}}});
  def.initial = [](Key, const KeySet&) { return TState{0}; };
  def.t_init = [](TStateView a, Key, const KeySet&) { return a[0] == 0; };
  def.t_next_enum = [](TStateView a, const SystemState&) {
    return std::vector<TState>{TState{(a[0] + 1) % 3}};
  };
  def.t_next_check = [](TStateView a, TStateView b, const SystemState&) {
    return b[0] == (a[0] + 1) % 3;
  };
  def.t_blok = [](TStateView a, TStateView b) {
    return a[0] == 1 && b[0] == 2;
  };
  def.tstate_domain = [](const KeySet&) {
    return std::vector<TState>{{0}, {1}, {2}};
  };
  def.state_independent = true;
  return def;
}

}  // namespace

TaskSystemDef relay() { return relay_base(); }

TaskSystemDef relay_m3() {
  TaskSystemDef def = relay_base();
  def.name = "relay-m3";
  def.t_blok = [](TStateView a, TStateView b) {
    return (a[0] == 1 && b[0] == 2) || (a[0] == 2 && b[0] == 1);
  };
  def.validity = ValidityBundle{
      [](TStateView a, TStateView) { return a[0] == 0; },
      [](TStateView, TStateView) { return uint64_t{1}; },
      [](Key, const SystemState&) { return Ord(5); },  // constant, unsound
  };
  return def;
}

}  // namespace fsr::systems
