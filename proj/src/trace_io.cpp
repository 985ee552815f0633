#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "fsr/registry.hpp"
#include "fsr/run_engine.hpp"

namespace fsr {

void write_trace(std::ostream& os, const Trace& trace, const System& sys) {
  os << "fsr-trace 1\n";
  os << "system " << trace.system << '\n';
  os << "keys " << trace.nkeys;
  for (Key k = 0; k < trace.nkeys; ++k) os << ' ' << sys.keys().name(k);
  os << '\n';
  os << "sched " << trace.sched << '\n';
  os << "bound " << trace.bound << '\n';
  os << "seed " << trace.seed << '\n';
  os << "steps " << trace.steps() << '\n';
  os << "state 0\n" << sys.render_state(trace.states.at(0));
  for (size_t t = 0; t < trace.steps(); ++t) {
    const Selector sel = trace.picks[t];
    os << "pick " << (sel.is_stutter() ? "-" : sys.keys().name(sel.key_value()))
       << '\n';
    os << "state " << t + 1 << '\n' << sys.render_state(trace.states[t + 1]);
  }
}

namespace {

bool read_tagged(std::istream& is, std::string_view tag, std::string& rest) {
  std::string line;
  if (!std::getline(is, line)) return false;
  if (line.substr(0, tag.size()) != tag) return false;
  if (line.size() > tag.size() && line[tag.size()] != ' ') return false;
  rest = line.size() > tag.size() ? line.substr(tag.size() + 1) : "";
  return true;
}

std::optional<uint64_t> to_u64(std::string_view s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<SystemState> read_state_block(std::istream& is,
                                            const System& sys,
                                            size_t expect_index) {
  std::string rest;
  if (!read_tagged(is, "state", rest)) return std::nullopt;
  const auto idx = to_u64(rest);
  if (!idx || *idx != expect_index) return std::nullopt;
  std::vector<std::string> lines(sys.nkeys());
  for (auto& line : lines)
    if (!std::getline(is, line)) return std::nullopt;
  return sys.parse_state(lines);
}

}  // namespace

std::optional<Trace> read_trace(std::istream& is) {
  std::string rest;
  if (!read_tagged(is, "fsr-trace", rest) || rest != "1") return std::nullopt;

  Trace tr;
  if (!read_tagged(is, "system", tr.system)) return std::nullopt;
  if (!read_tagged(is, "keys", rest)) return std::nullopt;
  const auto nk = to_u64(rest.substr(0, rest.find(' ')));
  if (!nk) return std::nullopt;
  tr.nkeys = static_cast<uint32_t>(*nk);

  if (!find_system(tr.system)) return std::nullopt;
  const System sys = make_system(tr.system, tr.nkeys);

  if (!read_tagged(is, "sched", tr.sched)) return std::nullopt;
  if (!read_tagged(is, "bound", rest)) return std::nullopt;
  const auto bound = to_u64(rest);
  if (!bound) return std::nullopt;
  tr.bound = *bound;
  if (!read_tagged(is, "seed", rest)) return std::nullopt;
  const auto seed = to_u64(rest);
  if (!seed) return std::nullopt;
  tr.seed = *seed;
  if (!read_tagged(is, "steps", rest)) return std::nullopt;
  const auto steps = to_u64(rest);
  if (!steps) return std::nullopt;

  auto s0 = read_state_block(is, sys, 0);
  if (!s0) return std::nullopt;
  tr.states.push_back(std::move(*s0));
  for (uint64_t t = 1; t <= *steps; ++t) {
    if (!read_tagged(is, "pick", rest)) return std::nullopt;
    if (rest == "-") {
      tr.picks.push_back(Selector::stutter());
    } else {
      const auto k = sys.keys().find(rest);
      if (!k) return std::nullopt;
      tr.picks.push_back(Selector::key(*k));
    }
    auto st = read_state_block(is, sys, t);
    if (!st) return std::nullopt;
    tr.states.push_back(std::move(*st));
  }
  return tr;
}

}  // namespace fsr
