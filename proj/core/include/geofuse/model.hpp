#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "geofuse/train_config.hpp"

namespace geofuse {

struct ModelDims {
    int feature_dim = 0;
    int num_classes = 0; // 0 for regression
    int num_domains = 0;
    TaskKind task = TaskKind::Classification;

    int output_dim() const { return task == TaskKind::Classification ? num_classes : 1; }
};

ModelDims dims_of(const DatasetBundle& data);

// Everything one training run owns: parameters, the encoder/fusion/DP
// components (as views into the ParamStore), target standardization, and the
// per-epoch history.
struct ModelBundle {
    TrainConfig cfg;
    ModelDims dims;
    ParamStore params;

    std::optional<LocationEncoder> encoder;
    std::optional<DomainPredictor> dp;
    std::optional<ConcatHead> concat;
    std::optional<FilmHead> film;
    std::optional<GeoPriorsHead> geopriors;
    std::optional<D3gHead> d3g;
    std::optional<Linear> task_head; // fusion == None

    // Regression targets are standardized on the train split before MSE;
    // predictions are mapped back before metric computation.
    double target_mean = 0.0;
    double target_stdev = 1.0;

    std::vector<ParamId> task_params; // everything but the DP head
    std::vector<ParamId> dp_params;

    std::vector<EpochStats> history;
    int selected_epoch = -1;
    std::optional<DomainGeometry> geometry; // echoed from synthetic data
};

// Builds and seeds all components for the given dataset shape. Frozen
// featurizer state (RFF draws, frozen tables) is created here but never
// registered as parameters.
ModelBundle build_model(const TrainConfig& cfg, const ModelDims& dims,
                        std::shared_ptr<const FrozenTable> table = nullptr);

// Forward pass of one record recorded on a tape.
struct RecordGraph {
    Var prediction{};  // task output (logits / scalar); unset for GeoPriors
    Var task_loss{};   // L_TP for this record (D3G: L_pred + lambda * L_rel)
    Var dp_loss{};     // unset unless requested and a DP head exists
    // D3G components, exposed so the trainer can seed them separately.
    Var d3g_pred_loss{};
    Var d3g_rel_loss{};
};

RecordGraph build_record_graph(const ModelBundle& m, Tape& tape, const Record& rec,
                               bool with_dp);

// Value-level prediction for metrics: predicted class index (lowest-index
// argmax ties) or the de-standardized regression estimate.
double predict_value(const ModelBundle& m, const Record& rec);

// Task loss of one record (no DP term), inference path.
double record_task_loss(const ModelBundle& m, const Record& rec);

// Standardized target used inside training losses.
double standardized_target(const ModelBundle& m, double target);

} // namespace geofuse
