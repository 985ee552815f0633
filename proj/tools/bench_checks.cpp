// Compares the serial reference kernels against the OpenMP ones on the
// bakery graphs and verifies both produce identical reports.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fsr/obligations.hpp"
#include "fsr/reachability.hpp"
#include "fsr/registry.hpp"

using namespace fsr;

namespace {

double secs(std::chrono::steady_clock::time_point a,
            std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

std::string fingerprint(const CheckReport& r) {
  std::ostringstream os;
  append_jsonl(os, r);
  return os.str();
}

template <class Fn>
void row(const std::string& name, Fn&& check) {
  const auto t0 = std::chrono::steady_clock::now();
  const CheckReport serial = check(ExecPolicy::Serial);
  const auto t1 = std::chrono::steady_clock::now();
  const CheckReport parallel = check(ExecPolicy::Parallel);
  const auto t2 = std::chrono::steady_clock::now();
  const double ts = secs(t0, t1), tp = secs(t1, t2);
  const bool same = fingerprint(serial) == fingerprint(parallel);
  std::cout << std::left << std::setw(34) << name << std::right << std::fixed
            << std::setprecision(3) << std::setw(9) << ts << "s" << std::setw(9)
            << tp << "s  x" << std::setprecision(2) << (tp > 0 ? ts / tp : 0)
            << (same ? "" : "  MISMATCH") << '\n';
  if (!same) std::exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  uint32_t keys = argc > 1 ? static_cast<uint32_t>(std::atoi(argv[1])) : 2;
  const System sys = make_system("bakery-impl", keys);
  const System spec = make_system("bakery-spec", keys);

  std::cout << "exploring bakery-impl with " << keys << " keys...\n";
  const auto e0 = std::chrono::steady_clock::now();
  ExploreOptions so;
  so.policy = ExecPolicy::Serial;
  const StateGraph gs = explore(sys, so);
  const auto e1 = std::chrono::steady_clock::now();
  ExploreOptions po;
  po.policy = ExecPolicy::Parallel;
  const StateGraph gp = explore(sys, po);
  const auto e2 = std::chrono::steady_clock::now();
  std::cout << "states: " << gs.num_states() << " ("
            << to_string(gs.completeness()) << ")\n";
  if (gs.num_states() != gp.num_states()) {
    std::cout << "exploration MISMATCH\n";
    return 1;
  }
  std::cout << std::left << std::setw(34) << "kernel" << std::right
            << std::setw(10) << "serial" << std::setw(10) << "openmp\n";
  std::cout << std::left << std::setw(34) << "explore" << std::right
            << std::fixed << std::setprecision(3) << std::setw(9)
            << secs(e0, e1) << "s" << std::setw(9) << secs(e1, e2) << "s\n";

  const StateGraph& g = gs;
  row("system-props", [&](ExecPolicy p) { return check_system_props(g, sys, p); });
  row("valid-task", [&](ExecPolicy p) {
    return check_valid_task_obligations(g, sys, p);
  });
  row("match", [&](ExecPolicy p) {
    return check_match_obligations(g, sys, spec, p);
  });
  row("derived-system", [&](ExecPolicy p) {
    return check_derived_system_obligations(g, sys, p);
  });
  row("invariants", [&](ExecPolicy p) {
    return check_state_invariants(g, sys, p);
  });
  return 0;
}
