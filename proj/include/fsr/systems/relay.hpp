#pragma once

#include "fsr/system.hpp"

namespace fsr::systems {

/// Three-location cyclic toy system with state-independent transitions;
/// location 1 is blocked while some task sits at location 2.
TaskSystemDef relay();

/// Mutant m3: symmetric blocking between locations 1 and 2 (guaranteed
/// 2-cycle) and a constant t_nlock.
TaskSystemDef relay_m3();

}  // namespace fsr::systems
