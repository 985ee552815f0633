// fsrcheck: explore task systems, check the refinement/validity proof
// obligations on the explored graph, search blocking cycles, and simulate
// fair runs.
//
// Exit codes: 0 all checks passed on complete graphs, 1 usage/config error,
// 2 counterexample found, 3 qualified pass (bounded exploration).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fsr/measures.hpp"
#include "fsr/obligations.hpp"
#include "fsr/reachability.hpp"
#include "fsr/registry.hpp"
#include "fsr/run_engine.hpp"

namespace {

using namespace fsr;

struct CommonOpts {
  std::string system;
  uint32_t keys = 2;
  bool no_canon = false;
  bool serial = false;
  uint64_t state_cap = 1'000'000;
  std::optional<uint32_t> depth;
  std::string format = "text";
  std::string out;
};

ExploreOptions explore_opts(const CommonOpts& c) {
  ExploreOptions o;
  o.state_cap = c.state_cap;
  o.use_canon = !c.no_canon;
  o.policy = c.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
  o.depth = c.depth;
  return o;
}

int emit(const std::vector<CheckReport>& reports, const CommonOpts& c) {
  std::ostringstream jsonl;
  for (const auto& r : reports) append_jsonl(jsonl, r);
  if (c.format == "json") {
    std::cout << jsonl.str();
  } else {
    for (const auto& r : reports) print_text(std::cout, r);
  }
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    f << jsonl.str();
  }
  bool fail = false, qualified = false;
  for (const auto& r : reports) {
    fail |= !r.all_pass();
    qualified |= r.qualified;
  }
  return fail ? 2 : qualified ? 3 : 0;
}

int run_check(const CommonOpts& c, const std::string& spec_name,
              const std::vector<std::string>& suites,
              const std::string& dump_path) {
  const System sys = make_system(c.system, c.keys);
  const ExploreOptions eo = explore_opts(c);
  const ExecPolicy pol = eo.policy;

  auto want = [&](std::string_view s) {
    return std::find(suites.begin(), suites.end(), s) != suites.end();
  };
  const bool autosel = suites.empty();

  if (!autosel && want("substate-closure") && suites.size() == 1) {
    return emit({substate_closure_check(sys, eo)}, c);
  }

  const StateGraph g = explore(sys, eo);
  if (!dump_path.empty()) {
    std::ofstream f(dump_path, std::ios::binary);
    dump_graph(f, g, sys);
  }

  std::vector<CheckReport> reports;
  if (autosel || want("system-props"))
    reports.push_back(check_system_props(g, sys, pol));
  if ((autosel && sys.def().validity) || want("valid-task"))
    reports.push_back(check_valid_task_obligations(g, sys, pol));
  const bool has_spec = !spec_name.empty() || sys.def().refinement;
  if ((autosel && has_spec && sys.def().refinement) || want("match")) {
    const std::string sname = !spec_name.empty()
                                  ? spec_name
                                  : sys.def().refinement->spec_system;
    const System spec = make_system(sname, c.keys);
    reports.push_back(check_match_obligations(g, sys, spec, pol));
  }
  if ((autosel && sys.def().validity) || want("derived-system"))
    reports.push_back(check_derived_system_obligations(g, sys, pol));
  if ((autosel && !sys.def().invariants.empty()) || want("invariants"))
    reports.push_back(check_state_invariants(g, sys, pol));
  if (!autosel && want("substate-closure"))
    reports.push_back(substate_closure_check(sys, eo));
  return emit(reports, c);
}

std::unique_ptr<Scheduler> build_scheduler(const std::string& policy,
                                           uint32_t keys, uint64_t bound,
                                           uint64_t seed,
                                           const std::string& script_path) {
  if (policy == "rr") return make_round_robin(keys);
  if (policy == "aging") {
    const uint64_t b = bound ? bound : 2 * uint64_t{keys};
    return make_aging_random(keys, b, derive_seed(seed, 2));
  }
  if (policy == "script") {
    std::ifstream f(script_path);
    if (!f) throw std::invalid_argument("cannot open script " + script_path);
    const KeySet ks(keys);
    std::vector<Selector> sels;
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      if (line == "-") {
        sels.push_back(Selector::stutter());
      } else {
        const auto k = ks.find(line);
        if (!k) throw std::invalid_argument("script: unknown key " + line);
        sels.push_back(Selector::key(*k));
      }
    }
    return make_scripted(std::move(sels));
  }
  throw std::invalid_argument("unknown scheduler policy " + policy);
}

int run_simulate(const CommonOpts& c, const std::string& sched_policy,
                 uint64_t bound, uint64_t steps, uint64_t seed,
                 const std::string& script) {
  const System sys = make_system(c.system, c.keys);
  auto sched = build_scheduler(sched_policy, c.keys, bound, seed, script);
  const Trace tr = simulate(sys, *sched, steps, seed);
  if (c.out.empty()) {
    write_trace(std::cout, tr, sys);
  } else {
    std::ofstream f(c.out, std::ios::binary);
    write_trace(f, tr, sys);
  }
  return 0;
}

int run_refine(const CommonOpts& c, const std::string& impl_name,
               const std::string& spec_name, const std::string& sched_policy,
               uint64_t bound, uint64_t steps, uint64_t seed,
               const std::string& script,
               std::optional<uint64_t> horizon) {
  const System impl = make_system(impl_name, c.keys);
  const std::string sname =
      !spec_name.empty()
          ? spec_name
          : (impl.def().refinement ? impl.def().refinement->spec_system : "");
  if (sname.empty())
    throw std::invalid_argument(impl_name + " has no refinement bundle");
  const System spec = make_system(sname, c.keys);
  const ExecPolicy pol = c.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;

  auto sched = build_scheduler(sched_policy, c.keys, bound, seed, script);
  const Trace tr = simulate(impl, *sched, steps, seed);

  std::vector<CheckReport> reports;
  reports.push_back(check_run_legal(tr, impl, pol));
  const uint64_t b = sched->bound() ? sched->bound() : bound;
  const FairWitness fw = derive_fair_witness(tr, b);
  CheckReport fair;
  fair.suite = "fair-witness";
  fair.system = impl.name();
  fair.nkeys = c.keys;
  fair.states = tr.states.size();
  fair.note = "bound=" + std::to_string(b);
  TheoremResult ft;
  ft.name = "pick-fair";
  ft.cases = tr.steps();
  if (!fw.ok) {
    ft.verdict = Verdict::Fail;
    ft.cex = Counterexample{
        {{"key", impl.keys().name(fw.violation->first)},
         {"index", std::to_string(fw.violation->second)}},
        "selection gap exceeds the fairness bound"};
  }
  fair.theorems.push_back(std::move(ft));
  reports.push_back(std::move(fair));

  reports.push_back(check_refinement_trace(tr, impl, spec, pol));
  reports.push_back(
      starvation_report(detect_starvation(tr, impl, horizon), tr, impl));
  return emit(reports, c);
}

int run_cycles(const CommonOpts& c, uint32_t max_len) {
  const System sys = make_system(c.system, c.keys);
  const CycleSearchResult res =
      run_cycle_search(sys, max_len, explore_opts(c));
  std::vector<CheckReport> reports = {res.summary};
  for (const auto& r : res.reachability) reports.push_back(r);
  const int rc = emit(reports, c);
  // found-but-unreachable cycles are a note, not a counterexample
  if (rc == 2 && !res.any_reachable) return 0;
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair-stuttering refinement checker"};
  app.require_subcommand(1);

  CommonOpts c;
  std::string spec_name, dump_path, sched_policy = "rr", script;
  std::vector<std::string> suites;
  uint64_t bound = 0, steps = 1000, seed = 0;
  std::optional<uint64_t> horizon;
  uint32_t max_len = 4;

  auto add_common = [&](CLI::App* cmd, bool with_system = true) {
    if (with_system)
      cmd->add_option("--system", c.system, "registered system name")
          ->required();
    cmd->add_option("--keys", c.keys, "number of task keys")
        ->check(CLI::Range(1u, 16u));
    cmd->add_flag("--no-canon", c.no_canon, "disable canonicalization");
    cmd->add_flag("--serial", c.serial, "serial reference kernels");
    cmd->add_option("--state-cap", c.state_cap, "exploration state cap")
        ->envname("FSR_STATE_CAP");
    cmd->add_option("--depth", c.depth, "exploration depth limit");
    cmd->add_option("--format", c.format, "stdout format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", c.out, "write structured JSONL report here");
  };

  CLI::App* check = app.add_subcommand("check", "run obligation suites");
  add_common(check);
  check->add_option("--spec", spec_name, "spec system for the match suite");
  check->add_option("--suite", suites,
                    "suites to run (default: all applicable): system-props, "
                    "valid-task, match, derived-system, invariants, "
                    "substate-closure");
  check->add_option("--dump-graph", dump_path, "dump the explored graph");
  check->add_flag("--canon", "canonicalization is on by default; kept for "
                             "symmetry with --no-canon");

  CLI::App* sim = app.add_subcommand("simulate", "simulate a fair run");
  add_common(sim);
  sim->add_option("--sched", sched_policy, "rr | aging | script");
  sim->add_option("--bound", bound, "fairness bound for aging");
  sim->add_option("--steps", steps, "number of steps");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--script", script, "script file for --sched script");

  CLI::App* refine = app.add_subcommand(
      "refine", "simulate and check trace-level refinement");
  add_common(refine, false);
  refine->add_option("--impl", c.system, "implementation system")->required();
  refine->add_option("--spec", spec_name, "spec system");
  refine->add_option("--sched", sched_policy, "rr | aging | script");
  refine->add_option("--bound", bound, "fairness bound");
  refine->add_option("--steps", steps, "number of steps");
  refine->add_option("--seed", seed, "master seed");
  refine->add_option("--script", script, "script file");
  refine->add_option("--horizon", horizon, "progress horizon")
      ->envname("FSR_HORIZON");

  CLI::App* cycles =
      app.add_subcommand("cycles", "blocking-relation cycle search");
  add_common(cycles);
  cycles->add_option("--max-len", max_len, "maximum cycle length")
      ->check(CLI::Range(1u, 6u));

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_check(c, spec_name, suites, dump_path);
    if (sim->parsed())
      return run_simulate(c, sched_policy, bound, steps, seed, script);
    if (refine->parsed())
      return run_refine(c, c.system, spec_name, sched_policy, bound, steps,
                        seed, script, horizon);
    if (cycles->parsed()) return run_cycles(c, max_len);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
