#pragma once

#include <json.hpp>

#include "rbfnet/layers.hpp"

namespace rbfnet {

// layer descriptions shared by config files and checkpoint headers
nlohmann::json layer_to_json(const LayerSpec& spec);
LayerSpec layer_from_json(const nlohmann::json& j);

}  // namespace rbfnet
