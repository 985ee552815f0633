#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsr/ordinal.hpp"

namespace fsr {

/// Task identifier: position in the fixed key order, so ndx(k) == k.
using Key = uint32_t;

/// Per-task state: field values aligned to the owning system's schema.
using TState = std::vector<int64_t>;
using TStateView = std::span<const int64_t>;

inline bool tstate_eq(TStateView a, TStateView b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

/// Fixed finite ordered set of task keys.
class KeySet {
 public:
  KeySet() = default;
  explicit KeySet(uint32_t n);
  uint32_t size() const { return static_cast<uint32_t>(names_.size()); }
  const std::string& name(Key k) const { return names_.at(k); }
  std::optional<Key> find(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

/// A key or the stutter marker; the stutter marker is not a key.
class Selector {
 public:
  static Selector stutter() { return Selector{}; }
  static Selector key(Key k) {
    Selector s;
    s.key_ = k;
    return s;
  }
  bool is_stutter() const { return !key_.has_value(); }
  Key key_value() const { return key_.value(); }
  friend bool operator==(const Selector&, const Selector&) = default;

 private:
  std::optional<Key> key_;
};

enum class FieldKind { Nat, Bool, Enum, KeyName };

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::Nat;
  std::vector<std::string> labels;  // Enum only
};

/// Field layout of a system's t-states; fields are kept sorted by name so
/// the serialized form is canonical.
class TStateSchema {
 public:
  TStateSchema() = default;
  explicit TStateSchema(std::vector<FieldSpec> fields);
  size_t width() const { return fields_.size(); }
  const std::vector<FieldSpec>& fields() const { return fields_; }
  size_t index_of(std::string_view name) const;

  std::string render(TStateView ts, const KeySet& keys) const;
  std::optional<TState> parse(std::string_view text, const KeySet& keys) const;

  /// Equality ignoring KeyName fields; used when matching t-states from a
  /// key-agnostic domain against concrete tasks.
  bool matches_ignoring_keys(TStateView a, TStateView b) const;

 private:
  std::vector<FieldSpec> fields_;
};

/// Total map from keys to t-states, stored flat.
class SystemState {
 public:
  SystemState() = default;
  SystemState(uint32_t nkeys, size_t width)
      : nkeys_(nkeys), width_(width), v_(size_t{nkeys} * width, 0) {}

  uint32_t nkeys() const { return nkeys_; }
  size_t width() const { return width_; }
  TStateView at(Key k) const { return {v_.data() + k * width_, width_}; }
  void set(Key k, TStateView ts);
  uint64_t hash() const;

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  uint32_t nkeys_ = 0;
  size_t width_ = 0;
  std::vector<int64_t> v_;
};

struct ValidityBundle {
  std::function<bool(TStateView a, TStateView b)> t_noblk;
  std::function<uint64_t(TStateView a, TStateView b)> t_nstrv;
  std::function<Ord(Key k, const SystemState& x)> t_nlock;
};

struct RefinementBundle {
  std::string spec_system;  // registered name of the mapped-to system
  std::function<TState(TStateView a)> t_map;
  std::function<Ord(TStateView a)> t_rank;
};

struct StateInvariant {
  std::string name;
  std::function<bool(const SystemState&, const KeySet&)> holds;
};

/// User-supplied task-level definitions for one system.  t_next_check is
/// the mandatory relational interface; t_next_enum is optional and needed
/// only by exploration and simulation.
struct TaskSystemDef {
  std::string name;
  TStateSchema schema;
  std::function<TState(Key k, const KeySet&)> initial;
  std::function<bool(TStateView a, Key k, const KeySet&)> t_init;
  std::function<bool(TStateView a, TStateView b, const SystemState& x)>
      t_next_check;
  std::function<bool(TStateView a, TStateView b)> t_blok;
  std::function<std::vector<TState>(TStateView a, const SystemState& x)>
      t_next_enum;                                       // nullable
  std::function<SystemState(const SystemState&)> canon;  // nullable
  std::function<std::vector<TState>(const KeySet&)> tstate_domain;  // nullable
  std::optional<ValidityBundle> validity;
  std::optional<RefinementBundle> refinement;
  bool state_independent = false;  // t_next_check ignores x
  std::vector<StateInvariant> invariants;
};

/// A task-system definition bound to a fixed key set; derives the
/// system-level semantics.
class System {
 public:
  System(std::shared_ptr<const TaskSystemDef> def, uint32_t nkeys);

  const TaskSystemDef& def() const { return *def_; }
  std::shared_ptr<const TaskSystemDef> def_ptr() const { return def_; }
  const KeySet& keys() const { return keys_; }
  const std::string& name() const { return def_->name; }
  uint32_t nkeys() const { return keys_.size(); }

  SystemState initial_state() const;
  bool init(const SystemState& x) const;
  bool next_check(const SystemState& x, const SystemState& y, Key k) const;
  bool blok(const SystemState& x, Key k) const;
  bool legal_step(const SystemState& x, const SystemState& y,
                  Selector sel) const;

  bool has_enum() const { return static_cast<bool>(def_->t_next_enum); }
  std::vector<TState> succ_tstates(TStateView a, const SystemState& x) const;
  SystemState with(const SystemState& x, Key k, TStateView c) const;

  bool has_canon() const { return static_cast<bool>(def_->canon); }
  SystemState canon(const SystemState& x) const;

  /// Pointwise t_map; the result uses the mapped-to system's schema width.
  SystemState map_state(const SystemState& x) const;

  std::string render_state(const SystemState& x) const;
  std::optional<SystemState> parse_state(
      std::span<const std::string> lines) const;

 private:
  std::shared_ptr<const TaskSystemDef> def_;
  KeySet keys_;
};

/// Canonicalization helper: rebases the named numeric fields so the global
/// minimum becomes 0 and compresses inter-value gaps to at most gap_cap.
SystemState rebase_compress(const SystemState& x,
                            std::span<const size_t> fields, int64_t gap_cap);

}  // namespace fsr
