#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsr/parallel.hpp"
#include "fsr/report.hpp"
#include "fsr/system.hpp"

namespace fsr {

/// Finite run prefix: states[0..n] and the selector of each step.
/// Infinite-run properties are approximated on prefixes plus lasso
/// detection; every report derived from a trace says so.
struct Trace {
  std::string system;
  uint32_t nkeys = 0;
  std::string sched;   // scheduler descriptor
  uint64_t bound = 0;  // scheduler fairness bound (0 = unknown)
  uint64_t seed = 0;
  std::vector<SystemState> states;
  std::vector<Selector> picks;

  size_t steps() const { return picks.size(); }
};

/// Fair task selection policy.  pick(i) is called with i = 1, 2, ... in
/// order; fingerprint() exposes the internal state for lasso detection.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Selector pick(uint64_t i) = 0;
  virtual std::string descriptor() const = 0;
  virtual uint64_t bound() const = 0;
  virtual std::string fingerprint() const = 0;
};

std::unique_ptr<Scheduler> make_round_robin(uint32_t nkeys);

/// Ages grow each step; a key is forced once its age reaches bound minus
/// the key count, which keeps every selection gap below bound.  Requires
/// bound >= 2 * nkeys.
std::unique_ptr<Scheduler> make_aging_random(uint32_t nkeys, uint64_t bound,
                                             uint64_t seed);

std::unique_ptr<Scheduler> make_scripted(std::vector<Selector> script);

/// Rebuilds the scheduler a trace was produced with (nullptr for scripted
/// traces, whose script is not stored).
std::unique_ptr<Scheduler> scheduler_for_trace(const Trace& trace);

/// Seed derivation for the independent random streams (successor choice,
/// scheduler); all randomness flows from the one master seed.
uint64_t derive_seed(uint64_t master, uint64_t stream);

/// Runs `steps` legal steps: blocked or stuttering selections repeat the
/// state, unblocked ones apply a successor (seeded uniform choice when the
/// enumerator yields several).
Trace simulate(const System& sys, Scheduler& sched, uint64_t steps,
               uint64_t seed);

CheckReport check_run_legal(const Trace& trace, const System& sys,
                            ExecPolicy policy = ExecPolicy::Parallel);

struct FairWitness {
  uint64_t bound = 0;
  bool ok = true;
  std::optional<std::pair<Key, size_t>> violation;  // first key/index
  std::vector<uint64_t> max_gap;                    // per key
};

/// Builds fair(k, i) = bound - (steps since k was last selected) and
/// reports the first place it would go negative.
FairWitness derive_fair_witness(const Trace& trace, uint64_t bound);

/// Pointwise t_map of the states; the selector turns into a stutter
/// whenever the mapped state does not change.
Trace map_trace(const Trace& trace, const System& impl, const System& spec);

/// Trace-level refinement: the mapped trace is a legal spec run, stutter
/// steps with real implementation progress strictly decrease the picked
/// key's rank, and other keys' ranks never increase.
CheckReport check_refinement_trace(const Trace& trace, const System& impl,
                                   const System& spec,
                                   ExecPolicy policy = ExecPolicy::Parallel);

struct KeyFinding {
  Key key = 0;
  uint64_t progress_events = 0;
  uint64_t max_gap = 0;   // longest stretch without progress
  bool flagged = false;   // progress horizon exceeded
  bool lasso = false;     // repeated (canonical state, scheduler state)
  size_t lasso_start = 0;
  size_t lasso_end = 0;
};

struct StarvationFindings {
  uint64_t horizon = 0;
  std::vector<KeyFinding> keys;
  bool any() const;
};

/// Default horizon: 10 * card(keys) * (distinct canonical states seen).
StarvationFindings detect_starvation(const Trace& trace, const System& sys,
                                     std::optional<uint64_t> horizon = {});

CheckReport starvation_report(const StarvationFindings& f, const Trace& trace,
                              const System& sys);

void write_trace(std::ostream& os, const Trace& trace, const System& sys);

/// Reads a trace written by write_trace, resolving the system by name in
/// the registry.  Returns nullopt on malformed input.
std::optional<Trace> read_trace(std::istream& is);

}  // namespace fsr
