#pragma once

#include "fsr/system.hpp"

namespace fsr::systems {

/// Bakery mutual-exclusion implementation: 8 program locations, ticket
/// choosing with a compare-and-swap published shared max.
TaskSystemDef bakery_impl();

/// Mutant m1: t_noblk drops the "peer not choosing" conjunct.
TaskSystemDef bakery_impl_m1();

/// Mutant m2: t_rank constantly 0.
TaskSystemDef bakery_impl_m2();

/// Four-location ticket specification the implementation maps onto.
TaskSystemDef bakery_spec();

/// Shared max over every task's sh_max copy; 1 for an empty key set.
int64_t curr_sh_max(const SystemState& x);

/// Maxima of the pos / load fields over a bakery_spec state.
int64_t spec_max_pos(const SystemState& x);
int64_t spec_max_load(const SystemState& x);

}  // namespace fsr::systems
