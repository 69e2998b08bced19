#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geofuse/train_config.hpp"

namespace geofuse {

// `data` section of a run config: synthetic generator settings or CSV inputs
// (combined files, or a features/labels pair joined on key).
struct DataConfig {
    bool synthetic = true;
    SynthConfig synth;
    std::vector<std::string> csv_paths;
    std::string csv_features;
    std::string csv_labels;
    std::optional<TaskKind> csv_task; // overrides target-based inference
};

struct RunConfig {
    DataConfig data;
    TrainConfig train; // model + train + eval.selection sections combined
    std::string output_dir = "out";
};

// Strict parse (unknown keys rejected) and full echo (every default made
// explicit, mixtures resolved).
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json_text(const std::string& text, const std::string& where);
std::string run_config_echo_text(const RunConfig& cfg); // pretty JSON

DatasetBundle load_data(const DataConfig& cfg);

} // namespace geofuse
