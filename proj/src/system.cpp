#include "fsr/system.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fsr {

KeySet::KeySet(uint32_t n) {
  names_.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    if (i < 26) {
      names_.push_back(std::string(1, static_cast<char>('A' + i)));
    } else {
      names_.push_back("k" + std::to_string(i));
    }
  }
}

std::optional<Key> KeySet::find(std::string_view name) const {
  for (uint32_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

TStateSchema::TStateSchema(std::vector<FieldSpec> fields)
    : fields_(std::move(fields)) {
  std::sort(fields_.begin(), fields_.end(),
            [](const FieldSpec& a, const FieldSpec& b) {
              return a.name < b.name;
            });
  for (size_t i = 0; i + 1 < fields_.size(); ++i)
    if (fields_[i].name == fields_[i + 1].name)
      throw std::invalid_argument("schema: duplicate field " +
                                  fields_[i].name);
}

size_t TStateSchema::index_of(std::string_view name) const {
  for (size_t i = 0; i < fields_.size(); ++i)
    if (fields_[i].name == name) return i;
  throw std::out_of_range("schema: no field named " + std::string(name));
}

std::string TStateSchema::render(TStateView ts, const KeySet& keys) const {
  assert(ts.size() == fields_.size());
  std::string out;
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += ' ';
    out += fields_[i].name;
    out += '=';
    const int64_t v = ts[i];
    switch (fields_[i].kind) {
      case FieldKind::Nat:
        out += std::to_string(v);
        break;
      case FieldKind::Bool:
        out += v ? '1' : '0';
        break;
      case FieldKind::Enum:
        out += fields_[i].labels.at(static_cast<size_t>(v));
        break;
      case FieldKind::KeyName:
        out += keys.name(static_cast<Key>(v));
        break;
    }
  }
  return out;
}

std::optional<TState> TStateSchema::parse(std::string_view text,
                                          const KeySet& keys) const {
  TState ts(fields_.size(), 0);
  size_t pos = 0;
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (i) {
      if (pos >= text.size() || text[pos] != ' ') return std::nullopt;
      ++pos;
    }
    const std::string& fname = fields_[i].name;
    if (text.substr(pos, fname.size()) != fname) return std::nullopt;
    pos += fname.size();
    if (pos >= text.size() || text[pos] != '=') return std::nullopt;
    ++pos;
    const size_t end = std::min(text.find(' ', pos), text.size());
    const std::string_view val = text.substr(pos, end - pos);
    switch (fields_[i].kind) {
      case FieldKind::Nat: {
        int64_t v = 0;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc() || p != val.data() + val.size())
          return std::nullopt;
        ts[i] = v;
        break;
      }
      case FieldKind::Bool:
        if (val == "1")
          ts[i] = 1;
        else if (val == "0")
          ts[i] = 0;
        else
          return std::nullopt;
        break;
      case FieldKind::Enum: {
        const auto& ls = fields_[i].labels;
        const auto it = std::find(ls.begin(), ls.end(), val);
        if (it == ls.end()) return std::nullopt;
        ts[i] = static_cast<int64_t>(it - ls.begin());
        break;
      }
      case FieldKind::KeyName: {
        const auto k = keys.find(val);
        if (!k) return std::nullopt;
        ts[i] = static_cast<int64_t>(*k);
        break;
      }
    }
    pos = end;
  }
  if (pos != text.size()) return std::nullopt;
  return ts;
}

bool TStateSchema::matches_ignoring_keys(TStateView a, TStateView b) const {
  if (a.size() != fields_.size() || b.size() != fields_.size()) return false;
  for (size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].kind == FieldKind::KeyName) continue;
    if (a[i] != b[i]) return false;
  }
  return true;
}

void SystemState::set(Key k, TStateView ts) {
  assert(ts.size() == width_ && k < nkeys_);
  std::copy(ts.begin(), ts.end(), v_.begin() + k * width_);
}

uint64_t SystemState::hash() const {
  // FNV-1a over the flat representation; stable across platforms.
  uint64_t h = 1469598103934665603ull;
  for (const int64_t x : v_) {
    uint64_t u = static_cast<uint64_t>(x);
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

System::System(std::shared_ptr<const TaskSystemDef> def, uint32_t nkeys)
    : def_(std::move(def)), keys_(nkeys) {}

SystemState System::initial_state() const {
  SystemState x(keys_.size(), def_->schema.width());
  for (Key k = 0; k < keys_.size(); ++k) x.set(k, def_->initial(k, keys_));
  return x;
}

bool System::init(const SystemState& x) const {
  for (Key k = 0; k < keys_.size(); ++k)
    if (!def_->t_init(x.at(k), k, keys_)) return false;
  return true;
}

bool System::next_check(const SystemState& x, const SystemState& y,
                        Key k) const {
  if (!def_->t_next_check(x.at(k), y.at(k), x)) return false;
  for (Key l = 0; l < keys_.size(); ++l)
    if (l != k && !tstate_eq(x.at(l), y.at(l))) return false;
  return true;
}

bool System::blok(const SystemState& x, Key k) const {
  for (Key l = 0; l < keys_.size(); ++l)
    if (def_->t_blok(x.at(k), x.at(l))) return true;
  return false;
}

bool System::legal_step(const SystemState& x, const SystemState& y,
                        Selector sel) const {
  if (sel.is_stutter() || blok(x, sel.key_value())) return x == y;
  return next_check(x, y, sel.key_value());
}

std::vector<TState> System::succ_tstates(TStateView a,
                                         const SystemState& x) const {
  if (!def_->t_next_enum)
    throw std::logic_error(def_->name + ": no successor enumerator");
  return def_->t_next_enum(a, x);
}

SystemState System::with(const SystemState& x, Key k, TStateView c) const {
  SystemState y = x;
  y.set(k, c);
  return y;
}

SystemState System::canon(const SystemState& x) const {
  return def_->canon ? def_->canon(x) : x;
}

SystemState System::map_state(const SystemState& x) const {
  if (!def_->refinement)
    throw std::logic_error(def_->name + ": no refinement bundle");
  const auto& map = def_->refinement->t_map;
  if (keys_.size() == 0) return SystemState(0, 0);
  TState first = map(x.at(0));
  SystemState m(keys_.size(), first.size());
  m.set(0, first);
  for (Key k = 1; k < keys_.size(); ++k) m.set(k, map(x.at(k)));
  return m;
}

std::string System::render_state(const SystemState& x) const {
  std::string out;
  for (Key k = 0; k < keys_.size(); ++k) {
    out += "key=" + keys_.name(k) + ' ' + def_->schema.render(x.at(k), keys_);
    out += '\n';
  }
  return out;
}

std::optional<SystemState> System::parse_state(
    std::span<const std::string> lines) const {
  if (lines.size() != keys_.size()) return std::nullopt;
  SystemState x(keys_.size(), def_->schema.width());
  for (Key k = 0; k < keys_.size(); ++k) {
    const std::string& line = lines[k];
    const std::string prefix = "key=" + keys_.name(k) + ' ';
    if (line.substr(0, prefix.size()) != prefix) return std::nullopt;
    const auto ts = def_->schema.parse(line.substr(prefix.size()), keys_);
    if (!ts) return std::nullopt;
    x.set(k, *ts);
  }
  return x;
}

SystemState rebase_compress(const SystemState& x,
                            std::span<const size_t> fields, int64_t gap_cap) {
  std::vector<int64_t> vals;
  vals.reserve(fields.size() * x.nkeys());
  for (Key k = 0; k < x.nkeys(); ++k)
    for (const size_t f : fields) vals.push_back(x.at(k)[f]);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::map<int64_t, int64_t> remap;
  int64_t u = 0;
  for (size_t i = 0; i < vals.size(); ++i) {
    if (i) u += std::min(vals[i] - vals[i - 1], gap_cap);
    remap[vals[i]] = u;
  }
  SystemState y = x;
  for (Key k = 0; k < x.nkeys(); ++k) {
    TState ts(x.at(k).begin(), x.at(k).end());
    for (const size_t f : fields) ts[f] = remap[ts[f]];
    y.set(k, ts);
  }
  return y;
}

}  // namespace fsr
