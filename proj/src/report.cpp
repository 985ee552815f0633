#include "fsr/report.hpp"

#include <ostream>

#include "json.hpp"

namespace fsr {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inapplicable:
      return "inapplicable";
  }
  return "?";
}

const std::string* Counterexample::find(std::string_view label) const {
  for (const auto& [l, payload] : items)
    if (l == label) return &payload;
  return nullptr;
}

bool CheckReport::all_pass() const {
  for (const auto& t : theorems)
    if (t.verdict == Verdict::Fail) return false;
  return true;
}

const TheoremResult* CheckReport::find(std::string_view theorem) const {
  for (const auto& t : theorems)
    if (t.name == theorem) return &t;
  return nullptr;
}

void print_text(std::ostream& os, const CheckReport& r) {
  os << "suite " << r.suite << " system=" << r.system << " keys=" << r.nkeys
     << " states=" << r.states;
  if (r.qualified) os << " [bounded: verdicts cover visited states only]";
  os << '\n';
  if (!r.note.empty()) os << "  note: " << r.note << '\n';
  for (const auto& t : r.theorems) {
    os << "  [" << to_string(t.verdict) << "] " << t.name << " (" << t.cases
       << " cases)\n";
    if (t.cex) {
      os << "    counterexample: " << t.cex->detail << '\n';
      for (const auto& [label, payload] : t.cex->items) {
        if (payload.find('\n') == std::string::npos) {
          os << "      " << label << ": " << payload << '\n';
        } else {
          os << "      " << label << ":\n";
          size_t start = 0;
          while (start < payload.size()) {
            size_t end = payload.find('\n', start);
            if (end == std::string::npos) end = payload.size();
            os << "        " << payload.substr(start, end - start) << '\n';
            start = end + 1;
          }
        }
      }
    }
  }
}

void append_jsonl(std::ostream& os, const CheckReport& r) {
  for (const auto& t : r.theorems) {
    nlohmann::json j;
    j["schema"] = "fsr.verdict.v1";
    j["suite"] = r.suite;
    j["system"] = r.system;
    j["keys"] = r.nkeys;
    j["states"] = r.states;
    j["qualified"] = r.qualified;
    j["theorem"] = t.name;
    j["verdict"] = std::string(to_string(t.verdict));
    j["cases"] = t.cases;
    if (!r.note.empty()) j["note"] = r.note;
    if (t.cex) {
      nlohmann::json c;
      c["detail"] = t.cex->detail;
      c["items"] = nlohmann::json::array();
      for (const auto& [label, payload] : t.cex->items)
        c["items"].push_back({{"label", label}, {"value", payload}});
      j["counterexample"] = c;
    }
    os << j.dump() << '\n';
  }
}

}  // namespace fsr
