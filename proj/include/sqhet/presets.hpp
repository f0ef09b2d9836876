#pragma once

#include <string>
#include <vector>

#include "sqhet/config.hpp"

namespace sqhet {

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> list_presets();

/// Complete, validated config for a named preset. Throws ConfigError for an
/// unknown name.
ExperimentConfig make_preset(const std::string& name);

}  // namespace sqhet
