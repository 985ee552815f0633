#include "fsr/measures.hpp"

#include <algorithm>

#include "fsr/run_engine.hpp"

namespace fsr {

namespace {

std::string chain_text(const std::vector<Key>& chain) {
  std::string s = "pikblk chain revisits a key:";
  for (const Key k : chain) s += " " + std::to_string(k);
  return s;
}

const ValidityBundle& bundle(const System& sys) {
  if (!sys.def().validity)
    throw std::logic_error(sys.name() + ": no validity bundle");
  return *sys.def().validity;
}

}  // namespace

PikblkCycleError::PikblkCycleError(std::vector<Key> chain)
    : std::runtime_error(chain_text(chain)), chain_(std::move(chain)) {}

bool sys_noblk(Key k, const SystemState& x, const System& sys) {
  const auto& vb = bundle(sys);
  for (Key l = 0; l < sys.nkeys(); ++l)
    if (!vb.t_noblk(x.at(k), x.at(l))) return false;
  return true;
}

Key pikblk(Key k, const SystemState& x, const System& sys) {
  for (Key l = 0; l < sys.nkeys(); ++l)
    if (sys.def().t_blok(x.at(k), x.at(l))) return l;
  throw std::invalid_argument("pikblk: key " + std::to_string(k) +
                              " is not blocked");
}

uint64_t sum_nsts(Key k, const SystemState& x, const System& sys) {
  const auto& vb = bundle(sys);
  uint64_t acc = 1;
  for (Key l = 0; l < sys.nkeys(); ++l)
    if (!vb.t_noblk(x.at(k), x.at(l))) acc += vb.t_nstrv(x.at(k), x.at(l));
  return acc;
}

std::vector<StarverTraceEntry> starver_trace(Key k, const SystemState& x,
                                             const System& sys) {
  std::vector<StarverTraceEntry> out;
  std::vector<Key> chain;
  std::vector<bool> visited(sys.nkeys(), false);
  Key cur = k;
  while (sys.blok(x, cur)) {
    if (visited[cur]) {
      chain.push_back(cur);
      throw PikblkCycleError(std::move(chain));
    }
    visited[cur] = true;
    chain.push_back(cur);
    out.push_back({cur, sum_nsts(cur, x, sys), true});
    cur = pikblk(cur, x, sys);
  }
  out.push_back({cur, sum_nsts(cur, x, sys), false});
  return out;
}

Key starver(Key k, const SystemState& x, const System& sys) {
  return starver_trace(k, x, sys).back().key;
}

std::vector<uint64_t> nstrvs_list(Key k, const SystemState& x,
                                  const System& sys) {
  std::vector<uint64_t> out;
  for (const auto& e : starver_trace(k, x, sys)) out.push_back(e.sum_nsts);
  return out;
}

Ord sys_nstrv(Key k, const SystemState& x, const System& sys) {
  const auto l = nstrvs_list(k, x, sys);
  return nats_to_ord(sys.nkeys(), std::span<const uint64_t>(l));
}

ProgResult prog_measure(const Trace& trace, Key k, size_t i,
                        uint64_t horizon) {
  if (k >= trace.nkeys || i >= trace.states.size())
    return {ProgResult::Status::Found, 0};  // ill-formed inputs
  for (uint64_t d = 0;; ++d) {
    const size_t j = i + d + 1;
    if (j >= trace.states.size()) return {ProgResult::Status::EndOfTrace, d};
    if (d > horizon) return {ProgResult::Status::HorizonExceeded, d};
    if (trace.picks[j - 1] == Selector::key(k) &&
        !(trace.states[j] == trace.states[j - 1]))
      return {ProgResult::Status::Found, d};
  }
}

}  // namespace fsr
