#pragma once

#include <cstdint>
#include <string>

#include "geofuse/data.hpp"
#include "geofuse/fusion.hpp"
#include "geofuse/locenc.hpp"

namespace geofuse {

enum class Selection {
    HighestValMetric,
    LowestValLoss,
    HighestValWorstGroup,
};

enum class Objective {
    Erm,
    GroupDro,
};

struct TrainConfig {
    // Loss weights and schedule.
    double alpha = 0.2;        // domain-prediction loss weight
    int epochs = 8;
    int batch_size = 32;
    double lr0 = 1e-3;
    double decay = 0.96;       // per-epoch learning-rate factor
    double dp_lr_factor = 0.1; // DP head lr relative to the task lr
    std::uint64_t seed = 0;

    // Architecture.
    FusionKind fusion = FusionKind::Concat; // None = image-features-only model
    EncoderKind encoder = EncoderKind::Wrap;
    int rff_dim = kDefaultRffDim;
    double rff_sigma = 1.0;
    std::string frozen_features_path; // FrozenTable encoder input

    // D3G.
    double d3g_lambda = 0.5;  // consistency loss weight
    double d3g_beta = 0.8;    // fixed/learned relation interpolation
    int d3g_projections = 4;
    double d3g_tau = 1.0;

    // Objective and robustness baseline.
    Objective objective = Objective::Erm;
    double groupdro_eta = 0.01;

    Selection selection = Selection::HighestValMetric;
};

void validate(const TrainConfig& cfg);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0; // task loss only, no DP term
    double val_avg = 0.0;
    double val_worst = 0.0;
    double lr = 0.0;
};

// Report tag matching the experiment naming: ERM, GroupDRO, or the fusion
// name with a "+DP" suffix when alpha > 0.
std::string method_tag(const TrainConfig& cfg);

const char* selection_name(Selection s);
Selection selection_from(const std::string& name);
const char* objective_name(Objective o);
Objective objective_from(const std::string& name);

} // namespace geofuse
