#pragma once

// Internal JSON converters shared by checkpoints, run configs, and reports.
// Parsing is strict: unknown keys are rejected so config typos fail loudly.

#include <string>

#include <json.hpp>

#include "geofuse/errors.hpp"
#include "geofuse/metrics.hpp"
#include "geofuse/model.hpp"

namespace geofuse::codec {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where);

json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const json& j, const std::string& where);

json dims_to_json(const ModelDims& dims);
ModelDims dims_from_json(const json& j, const std::string& where);

json history_to_json(const std::vector<EpochStats>& history);
std::vector<EpochStats> history_from_json(const json& j);

json geometry_to_json(const DomainGeometry& g);
DomainGeometry geometry_from_json(const json& j, const std::string& where);

json metrics_to_json(const GroupMetrics& m);

// Serializes with 2-space indentation and renames into place.
void write_json_atomic(const json& doc, const std::string& path);

} // namespace geofuse::codec
