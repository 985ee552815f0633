#pragma once

#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "fsr/parallel.hpp"
#include "fsr/report.hpp"
#include "fsr/system.hpp"

namespace fsr {

enum class Completeness { Complete, TruncatedByDepth, TruncatedByCap };
std::string_view to_string(Completeness c);

struct Transition {
  uint32_t src;
  Key key;
  uint32_t dst;
};

/// Deduplicated set of (canonical) states plus the legal transitions
/// between them, in deterministic BFS discovery order.
class StateGraph {
 public:
  uint32_t insert(SystemState s);  // returns id; dedups
  std::optional<uint32_t> find(const SystemState& s) const;

  size_t num_states() const { return states_.size(); }
  const SystemState& state(uint32_t id) const { return states_[id]; }
  const std::vector<Transition>& transitions() const { return edges_; }
  const std::vector<uint32_t>& initial_ids() const { return initial_; }
  Completeness completeness() const { return completeness_; }
  bool complete() const { return completeness_ == Completeness::Complete; }

  void add_edge(uint32_t src, Key k, uint32_t dst) {
    edges_.push_back({src, k, dst});
  }
  void mark_initial(uint32_t id) { initial_.push_back(id); }
  void set_completeness(Completeness c) { completeness_ = c; }

 private:
  std::vector<SystemState> states_;
  std::vector<Transition> edges_;
  std::vector<uint32_t> initial_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> index_;  // hash buckets
  Completeness completeness_ = Completeness::Complete;
};

struct ExploreOptions {
  std::optional<uint32_t> depth;  // BFS levels; unlimited when absent
  size_t state_cap = 1'000'000;
  bool use_canon = true;
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// Breadth-first closure from the initial state under legal non-stuttering
/// steps (blocked keys do not move), with optional canonicalization for
/// dedup.  Requires a successor enumerator.
StateGraph explore(const System& sys, const ExploreOptions& opts = {});

void dump_graph(std::ostream& os, const StateGraph& g, const System& sys);

/// For state-independent systems: every projection of a reachable n-key
/// state onto n-1 keys must be reachable in the (n-1)-key instance.
/// n is taken from sys.nkeys().
CheckReport substate_closure_check(const System& sys,
                                   const ExploreOptions& opts = {});

}  // namespace fsr
