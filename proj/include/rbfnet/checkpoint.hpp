#pragma once

#include <string>

#include "rbfnet/model.hpp"

namespace rbfnet {

// container: magic "RBCK" | u32 header length | JSON header (architecture,
// head metadata, steering spec, parameter count) | f64 little-endian
// parameter blob in model_parameters order. round-trips bit-exactly.
void save_checkpoint(const std::string& path, const Model& model);
Model load_checkpoint(const std::string& path);

}  // namespace rbfnet
