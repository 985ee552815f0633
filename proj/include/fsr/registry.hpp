#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "fsr/system.hpp"

namespace fsr {

/// Looks up a compiled-in system definition; nullptr when unknown.
std::shared_ptr<const TaskSystemDef> find_system(std::string_view name);

std::vector<std::string> system_names();

/// find_system + bind to a key set; throws std::invalid_argument on an
/// unknown name.
System make_system(std::string_view name, uint32_t nkeys);

}  // namespace fsr
