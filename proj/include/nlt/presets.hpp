#pragma once

#include <string_view>
#include <vector>

#include "nlt/config.hpp"

namespace nlt {

std::vector<std::string_view> preset_names();

// The three published experiments, expanded verbatim.
ScenarioConfig preset_config(std::string_view name);

}  // namespace nlt
