#pragma once

#include <stdexcept>
#include <vector>

#include "fsr/ordinal.hpp"
#include "fsr/system.hpp"

namespace fsr {

struct Trace;

/// The pikblk chain revisited a key: the t_nlock obligation is violated and
/// the starver recursion would diverge.
class PikblkCycleError : public std::runtime_error {
 public:
  explicit PikblkCycleError(std::vector<Key> chain);
  const std::vector<Key>& chain() const { return chain_; }

 private:
  std::vector<Key> chain_;
};

/// t_noblk holds from k against every key's t-state.
bool sys_noblk(Key k, const SystemState& x, const System& sys);

/// Least key whose t-state blocks k; requires sys.blok(x, k).
Key pikblk(Key k, const SystemState& x, const System& sys);

struct StarverTraceEntry {
  Key key;
  uint64_t sum_nsts;
  bool blocked;  // the last entry is the unblocked starver
};

/// The pikblk chain from k to its unblocked starver, with each key's
/// summed may-block measure.  Throws PikblkCycleError on a revisit.
std::vector<StarverTraceEntry> starver_trace(Key k, const SystemState& x,
                                             const System& sys);

Key starver(Key k, const SystemState& x, const System& sys);

/// 1 + sum over keys l of (t_noblk(g k x, g l x) ? 0 : t_nstrv(...)).
uint64_t sum_nsts(Key k, const SystemState& x, const System& sys);

std::vector<uint64_t> nstrvs_list(Key k, const SystemState& x,
                                  const System& sys);

/// First-aligned ordinal over the starver chain's sums:
/// nats_to_ord(card(keys), nstrvs_list).
Ord sys_nstrv(Key k, const SystemState& x, const System& sys);

struct ProgResult {
  enum class Status { Found, EndOfTrace, HorizonExceeded };
  Status status = Status::Found;
  uint64_t value = 0;

  bool found() const { return status == Status::Found; }
};

/// Least d >= 0 such that step i+d+1 picks k and the state changes;
/// ill-formed keys yield 0.  Running past the trace or the horizon is a
/// finding, not an error.
ProgResult prog_measure(const Trace& trace, Key k, size_t i,
                        uint64_t horizon);

}  // namespace fsr
