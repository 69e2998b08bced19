#pragma once

#include <string>

#include "geofuse/model.hpp"

namespace geofuse {

// JSON checkpoint: config echo, dims, every parameter tensor (name -> shape
// -> row-major values), target standardization, selected epoch, history, and
// the synthetic domain geometry when one exists. Written atomically
// (write-then-rename). RFF featurizer state is regenerated from the seeded
// config on load; frozen tables are re-read from the recorded path.
void save_checkpoint(const ModelBundle& model, const std::string& path);
ModelBundle load_checkpoint(const std::string& path);

} // namespace geofuse
