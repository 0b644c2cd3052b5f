#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mad/harness.hpp"

namespace mad {

// Experiment presets shipped with the library, in listing order.
const std::vector<ExperimentPreset>& preset_catalog();

std::optional<ExperimentPreset> find_preset(std::string_view name);

// Designs used by the Bernoulli-outcome grids.
Design unclipped_mad();  // delta_t = t^-0.24
Design clipped_mad();    // delta_t = max(t^-0.24, 0.2)

}  // namespace mad
