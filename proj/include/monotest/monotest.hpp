#pragma once

// Umbrella header.

#include "monotest/errors.hpp"
#include "monotest/function_io.hpp"
#include "monotest/function_model.hpp"
#include "monotest/hard_instances.hpp"
#include "monotest/random.hpp"
#include "monotest/rank_value.hpp"
#include "monotest/testers.hpp"
#include "monotest/verification.hpp"

namespace monotest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace monotest
