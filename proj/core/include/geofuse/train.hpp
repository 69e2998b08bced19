#pragma once

#include <span>

#include "geofuse/metrics.hpp"
#include "geofuse/model.hpp"

namespace geofuse {

// Per-domain weights on the probability simplex.
struct GroupWeights {
    std::vector<double> w;

    static GroupWeights uniform(int k);
    double sum() const;
};

// Exponentiated-gradient update: w'_g proportional to w_g * exp(eta * L_g),
// renormalized onto the simplex.
GroupWeights groupdro_reweight(const GroupWeights& w, std::span<const double> group_losses,
                               double eta);

struct BatchLosses {
    double task = 0.0;  // L_TP (D3G: L_pred + lambda * L_rel)
    double dp = 0.0;    // L_DP, zero when alpha == 0
    double total = 0.0; // task + alpha * dp
};

// Batch-mean losses; with alpha == 0 the DP term is neither computed nor
// traversed, so the DP head receives no gradient from this graph.
BatchLosses compute_losses(std::span<const Record> batch, const ModelBundle& model,
                           const TrainConfig& cfg);

// D3G composite training loss for a batch: mean of L_pred + lambda * L_rel
// (+ alpha * L_DP when alpha > 0). Requires D3G fusion and >= 2 domains.
double d3g_training_loss(std::span<const Record> batch, const ModelBundle& model,
                         const TrainConfig& cfg);

// Epoch loop: seeded shuffling, Adam on the task path with the decayed lr
// and a separate Adam on the DP head at dp_lr_factor times that lr, per-epoch
// validation metrics, and checkpoint selection (earliest epoch wins ties).
ModelBundle train_model(const DatasetBundle& data, const TrainConfig& cfg);

// argmax/argmin over epoch history per criterion; earliest epoch on ties.
int select_checkpoint(std::span<const EpochStats> history, Selection criterion);

GroupMetrics evaluate_split(const ModelBundle& model, std::span<const Record> records);

// Mean per-record task loss (no DP term) over a split.
double split_task_loss(const ModelBundle& model, std::span<const Record> records);

struct SweepRow {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double avg = 0.0;
    double worst = 0.0;
};

// Default sweep list: no-DP plus the tuned range.
std::vector<double> default_alpha_sweep();

// One full train + test evaluation per (alpha, seed) pair, rows ordered by
// (alpha, seed). Cells are isolated; `threads` > 1 fans them out to workers
// and results merge by index, never by completion order.
std::vector<SweepRow> alpha_sweep(const DatasetBundle& data, const TrainConfig& base,
                                  std::span<const double> alphas,
                                  std::span<const std::uint64_t> seeds, int threads = 1);

} // namespace geofuse
