#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fsr {

struct OrdTerm;

/// Constructive ordinal below epsilon_0 in Cantor-normal-form style:
/// either a natural number, or a non-empty sequence of (exponent,
/// coefficient) terms with strictly decreasing exponents followed by a
/// natural remainder.  Values are immutable after construction.
class Ord {
 public:
  Ord() = default;
  Ord(uint64_t n) : tail_(n) {}  // naturals embed, intentionally implicit
  Ord(int n) : tail_(static_cast<uint64_t>(n)) {}

  bool is_nat() const { return terms_.empty(); }
  uint64_t nat_value() const;  // requires is_nat()
  const std::vector<OrdTerm>& terms() const { return terms_; }
  uint64_t tail() const { return tail_; }

  /// Builds from raw parts without enforcing the representation
  /// invariants; ord_wellformed reports whether they hold.
  static Ord from_parts(std::vector<OrdTerm> terms, uint64_t tail);

  friend bool operator==(const Ord& a, const Ord& b);
  friend bool operator!=(const Ord& a, const Ord& b) { return !(a == b); }

 private:
  std::vector<OrdTerm> terms_;
  uint64_t tail_ = 0;
  bool wf_ = true;

  friend bool ord_wellformed(const Ord&);
  friend int ord_cmp_raw(const Ord&, const Ord&);
  friend Ord make_ord(const Ord&, uint64_t, const Ord&);
};

struct OrdTerm {
  Ord exp;
  uint64_t coeff = 1;
};

bool operator==(const OrdTerm& a, const OrdTerm& b);

/// True iff o satisfies the representation invariants (well-formed
/// exponents, strictly decreasing, positive coefficients).
bool ord_wellformed(const Ord& o);

/// Strict ordinal order.  Throws std::invalid_argument on ill-formed input.
bool ord_lt(const Ord& a, const Ord& b);

/// Non-strict order, equivalent to !ord_lt(b, a).
bool ord_le(const Ord& a, const Ord& b);

/// w^exp * coeff + rest.  Requires exp well-formed and strictly greater
/// than the leading exponent of rest (a natural rest counts as exponent 0)
/// and coeff >= 1; throws std::invalid_argument otherwise.
Ord make_ord(const Ord& exp, uint64_t coeff, const Ord& rest);

/// Lexicographic product of an ordinal and a natural: w^(o+1)*1 + n when o
/// is a natural, w^o*1 + n otherwise.
Ord ord_nat_pair(const Ord& o, uint64_t n);

/// First-aligned encoding of a natural list: position i contributes the
/// term w^(n-i) * (1 + l[i]); positions past the list contribute
/// coefficient 1.  n = 0 yields 0.  Throws if n >= 1 and l is longer
/// than n.
Ord nats_to_ord(uint64_t n, std::span<const uint64_t> l);
Ord nats_to_ord(uint64_t n, std::initializer_list<uint64_t> l);

/// Rendering "w^<exp>*<coeff> + ... + <rem>", nested exponents in
/// parentheses; bare naturals render as decimal.
std::string to_string(const Ord& o);

/// Parses the to_string form.  Returns nullopt on syntax errors; the
/// returned ordinal may still be ill-formed (check ord_wellformed).
std::optional<Ord> parse_ord(std::string_view text);

}  // namespace fsr
