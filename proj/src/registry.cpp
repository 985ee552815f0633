#include "fsr/registry.hpp"

#include <map>
#include <stdexcept>

#include "fsr/systems/bakery.hpp"
#include "fsr/systems/relay.hpp"

namespace fsr {

namespace {

const std::map<std::string, std::shared_ptr<const TaskSystemDef>,
               std::less<>>&
table() {
  static const auto* t = [] {
    auto* m = new std::map<std::string, std::shared_ptr<const TaskSystemDef>,
                           std::less<>>();
    auto add = [&](TaskSystemDef def) {
      auto p = std::make_shared<const TaskSystemDef>(std::move(def));
      (*m)[p->name] = p;
    };
    add(systems::bakery_impl());
    add(systems::bakery_impl_m1());
    add(systems::bakery_impl_m2());
    add(systems::bakery_spec());
    add(systems::relay());
    add(systems::relay_m3());
    return m;
  }();
  return *t;
}

}  // namespace

std::shared_ptr<const TaskSystemDef> find_system(std::string_view name) {
  const auto it = table().find(name);
  return it == table().end() ? nullptr : it->second;
}

std::vector<std::string> system_names() {
  std::vector<std::string> out;
  for (const auto& [name, def] : table()) out.push_back(name);
  return out;
}

System make_system(std::string_view name, uint32_t nkeys) {
  auto def = find_system(name);
  if (!def)
    throw std::invalid_argument("unknown system: " + std::string(name));
  return System(std::move(def), nkeys);
}

}  // namespace fsr
