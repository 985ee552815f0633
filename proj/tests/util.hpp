#pragma once

#include <initializer_list>
#include <string_view>
#include <utility>
#include <vector>

#include "fsr/registry.hpp"
#include "fsr/system.hpp"

namespace fsr_test {

using namespace fsr;

inline TState ts_with(const TStateSchema& schema, TState base,
                      std::initializer_list<std::pair<std::string_view,
                                                      int64_t>> sets) {
  for (const auto& [name, v] : sets) base[schema.index_of(name)] = v;
  return base;
}

// t-state of key k built from the system's initial value plus overrides
inline TState ts_of(const System& sys, Key k,
                    std::initializer_list<std::pair<std::string_view,
                                                    int64_t>> sets) {
  return ts_with(sys.def().schema, sys.def().initial(k, sys.keys()), sets);
}

inline SystemState state_of(const System& sys,
                            const std::vector<TState>& tstates) {
  SystemState x(sys.nkeys(), sys.def().schema.width());
  for (Key k = 0; k < sys.nkeys(); ++k) x.set(k, tstates.at(k));
  return x;
}

}  // namespace fsr_test
