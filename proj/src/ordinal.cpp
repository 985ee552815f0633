#include "fsr/ordinal.hpp"

#include <cassert>
#include <charconv>
#include <stdexcept>

namespace fsr {

uint64_t Ord::nat_value() const {
  if (!is_nat()) throw std::logic_error("nat_value on infinite ordinal");
  return tail_;
}

bool operator==(const OrdTerm& a, const OrdTerm& b) {
  return a.coeff == b.coeff && a.exp == b.exp;
}

bool operator==(const Ord& a, const Ord& b) {
  return a.tail_ == b.tail_ && a.terms_ == b.terms_;
}

// Structural comparison; does not require well-formed inputs but is only
// meaningful for canonical representations.
int ord_cmp_raw(const Ord& a, const Ord& b) {
  const size_t na = a.terms_.size(), nb = b.terms_.size();
  for (size_t i = 0; i < na || i < nb; ++i) {
    if (i == na) return -1;  // a's tail is finite, b still has an w-term
    if (i == nb) return 1;
    int c = ord_cmp_raw(a.terms_[i].exp, b.terms_[i].exp);
    if (c != 0) return c;
    if (a.terms_[i].coeff != b.terms_[i].coeff)
      return a.terms_[i].coeff < b.terms_[i].coeff ? -1 : 1;
  }
  if (a.tail_ != b.tail_) return a.tail_ < b.tail_ ? -1 : 1;
  return 0;
}

bool ord_wellformed(const Ord& o) { return o.wf_; }

namespace {

bool compute_wf(const std::vector<OrdTerm>& terms) {
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coeff < 1) return false;
    if (!ord_wellformed(terms[i].exp)) return false;
    if (terms[i].exp == Ord(0)) return false;  // exponent 0 lives in the tail
    if (i + 1 < terms.size() &&
        ord_cmp_raw(terms[i + 1].exp, terms[i].exp) >= 0)
      return false;
  }
  return true;
}

void require_wf(const Ord& o, const char* who) {
  if (!ord_wellformed(o))
    throw std::invalid_argument(std::string(who) + ": ill-formed ordinal");
}

}  // namespace

Ord Ord::from_parts(std::vector<OrdTerm> terms, uint64_t tail) {
  Ord o;
  o.wf_ = compute_wf(terms);
  o.terms_ = std::move(terms);
  o.tail_ = tail;
  return o;
}

bool ord_lt(const Ord& a, const Ord& b) {
  require_wf(a, "ord_lt");
  require_wf(b, "ord_lt");
  return ord_cmp_raw(a, b) < 0;
}

bool ord_le(const Ord& a, const Ord& b) {
  require_wf(a, "ord_le");
  require_wf(b, "ord_le");
  return ord_cmp_raw(a, b) <= 0;
}

Ord make_ord(const Ord& exp, uint64_t coeff, const Ord& rest) {
  require_wf(exp, "make_ord");
  require_wf(rest, "make_ord");
  if (coeff < 1) throw std::invalid_argument("make_ord: zero coefficient");
  const Ord& lead = rest.terms_.empty() ? Ord(0) : rest.terms_.front().exp;
  if (!(ord_cmp_raw(lead, exp) < 0))
    throw std::invalid_argument(
        "make_ord: exponent not above the leading exponent of rest");
  Ord o;
  o.terms_.reserve(rest.terms_.size() + 1);
  o.terms_.push_back(OrdTerm{exp, coeff});
  o.terms_.insert(o.terms_.end(), rest.terms_.begin(), rest.terms_.end());
  o.tail_ = rest.tail_;
  o.wf_ = true;
  return o;
}

Ord ord_nat_pair(const Ord& o, uint64_t n) {
  require_wf(o, "ord_nat_pair");
  if (o.is_nat()) return make_ord(Ord(o.nat_value() + 1), 1, Ord(n));
  return make_ord(o, 1, Ord(n));
}

Ord nats_to_ord(uint64_t n, std::span<const uint64_t> l) {
  if (n == 0) return Ord(0);
  if (l.size() > n)
    throw std::invalid_argument("nats_to_ord: list longer than n");
  Ord acc(0);
  for (uint64_t e = 1; e <= n; ++e) {
    const uint64_t i = n - e;  // list position feeding exponent e
    const uint64_t coeff = i < l.size() ? 1 + l[i] : 1;
    acc = make_ord(Ord(e), coeff, acc);
  }
  return acc;
}

Ord nats_to_ord(uint64_t n, std::initializer_list<uint64_t> l) {
  return nats_to_ord(n, std::span<const uint64_t>(l.begin(), l.size()));
}

std::string to_string(const Ord& o) {
  if (o.is_nat()) return std::to_string(o.nat_value());
  std::string out;
  for (const OrdTerm& t : o.terms()) {
    out += "w^";
    if (t.exp.is_nat()) {
      out += std::to_string(t.exp.nat_value());
    } else {
      out += "(" + to_string(t.exp) + ")";
    }
    out += "*" + std::to_string(t.coeff) + " + ";
  }
  out += std::to_string(o.tail());
  return out;
}

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;

  bool eat(std::string_view tok) {
    if (s.substr(pos, tok.size()) == tok) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  std::optional<uint64_t> nat() {
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc() || p == s.data() + pos) return std::nullopt;
    pos = static_cast<size_t>(p - s.data());
    return v;
  }

  std::optional<Ord> ord() {
    std::vector<OrdTerm> terms;
    while (eat("w^")) {
      Ord exp;
      if (eat("(")) {
        auto inner = ord();
        if (!inner || !eat(")")) return std::nullopt;
        exp = *inner;
      } else {
        auto e = nat();
        if (!e) return std::nullopt;
        exp = Ord(*e);
      }
      if (!eat("*")) return std::nullopt;
      auto c = nat();
      if (!c) return std::nullopt;
      terms.push_back(OrdTerm{exp, *c});
      if (!eat(" + ")) return std::nullopt;
    }
    auto t = nat();
    if (!t) return std::nullopt;
    return Ord::from_parts(std::move(terms), *t);
  }
};

}  // namespace

std::optional<Ord> parse_ord(std::string_view text) {
  Parser p{text};
  auto o = p.ord();
  if (!o || p.pos != text.size()) return std::nullopt;
  return o;
}

}  // namespace fsr
