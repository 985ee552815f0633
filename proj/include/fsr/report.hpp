#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fsr {

enum class Verdict { Pass, Fail, Inapplicable };
std::string_view to_string(Verdict v);

/// Concrete witness for a failing theorem; items carry enough serialized
/// state to re-evaluate the theorem standalone.
struct Counterexample {
  std::vector<std::pair<std::string, std::string>> items;  // label -> payload
  std::string detail;

  const std::string* find(std::string_view label) const;
};

struct TheoremResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  uint64_t cases = 0;
  std::optional<Counterexample> cex;
};

struct CheckReport {
  std::string suite;
  std::string system;
  uint32_t nkeys = 0;
  uint64_t states = 0;
  bool qualified = false;  // graph truncated: verdicts cover visited states
  std::string note;
  std::vector<TheoremResult> theorems;

  bool all_pass() const;
  const TheoremResult* find(std::string_view theorem) const;
};

void print_text(std::ostream& os, const CheckReport& r);

/// One JSON object per theorem verdict, line-delimited.
void append_jsonl(std::ostream& os, const CheckReport& r);

}  // namespace fsr
