#pragma once

#include <span>
#include <vector>

#include "fsr/parallel.hpp"
#include "fsr/reachability.hpp"
#include "fsr/report.hpp"
#include "fsr/system.hpp"

namespace fsr {

/// Membership in the graph plays the role of the inductive invariant
/// hypothesis in every suite below; truncated graphs yield qualified
/// verdicts.

/// no-self-next and initial-state checks.
CheckReport check_system_props(const StateGraph& g, const System& sys,
                               ExecPolicy policy = ExecPolicy::Parallel);

/// The four task-level obligations of a valid system: t-noblk-blk,
/// t-noblk-inv, t-nlock-decreases, t-nstrv-decreases.
CheckReport check_valid_task_obligations(const StateGraph& g,
                                         const System& sys,
                                         ExecPolicy policy = ExecPolicy::Parallel);

/// The three refinement-matching obligations against a spec system:
/// map-matches-next, map-finite-stutter, map-rank-stable.
CheckReport check_match_obligations(const StateGraph& g, const System& impl,
                                    const System& spec,
                                    ExecPolicy policy = ExecPolicy::Parallel);

/// The six derived system-level obligations, evaluated with the
/// constructed sys_noblk / starver / sys_nstrv: noblk-blk, noblk-inv,
/// starver-unblocked, nstrv-decreases, nstrv-holds, starver-persists,
/// plus starver-terminates for pikblk cycles.
CheckReport check_derived_system_obligations(
    const StateGraph& g, const System& sys,
    ExecPolicy policy = ExecPolicy::Parallel);

/// User invariant over every stored state.
CheckReport check_state_invariant(const StateGraph& g, const System& sys,
                                  const StateInvariant& inv,
                                  ExecPolicy policy = ExecPolicy::Parallel);

/// All registered invariants of the system in one report.
CheckReport check_state_invariants(const StateGraph& g, const System& sys,
                                   ExecPolicy policy = ExecPolicy::Parallel);

struct BlockingCycle {
  std::vector<TState> tstates;  // a1 ->blok a2 ->blok ... ->blok a1
};

/// The finite t-state domain for cycle search: the declared domain when
/// present, else the distinct t-states of the complete canonical 1-key
/// closure.
std::vector<TState> blocking_domain(const System& sys);

/// Simple cycles in the blocking relation over the domain, up to max_len,
/// deduplicated up to rotation.
std::vector<BlockingCycle> find_blocking_cycles(const System& sys,
                                                std::span<const TState> domain,
                                                uint32_t max_len);

/// Explores the n-key instance (n = cycle length) and looks for a
/// reachable state where distinct keys instantiate the cycle (t-states
/// matching up to key identity) with every blocking edge holding at once.
CheckReport check_cycle_reachability(const System& sys,
                                     const BlockingCycle& cycle,
                                     const ExploreOptions& opts = {});

struct CycleSearchResult {
  std::vector<BlockingCycle> cycles;
  std::vector<CheckReport> reachability;  // one per cycle
  CheckReport summary;                    // no-potential-cycles / no-reachable-cycles
  bool any_reachable = false;
};

CycleSearchResult run_cycle_search(const System& sys, uint32_t max_len,
                                   const ExploreOptions& opts = {});

/// Re-evaluates a reported counterexample standalone; returns true when
/// the theorem holds on it (i.e. false reproduces the failure).
bool replay_counterexample(const System& sys, const System* spec,
                           std::string_view theorem,
                           const Counterexample& cex);

}  // namespace fsr
