#include "geofuse/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "geofuse/errors.hpp"
#include "geofuse/optim.hpp"

namespace geofuse {

GroupWeights GroupWeights::uniform(int k) {
    if (k < 1) {
        throw ConfigError("group weights need at least one group");
    }
    GroupWeights gw;
    gw.w.assign(static_cast<std::size_t>(k), 1.0 / k);
    return gw;
}

double GroupWeights::sum() const {
    double s = 0.0;
    for (double x : w) {
        s += x;
    }
    return s;
}

GroupWeights groupdro_reweight(const GroupWeights& w, std::span<const double> group_losses,
                               double eta) {
    if (eta <= 0.0) {
        throw ConfigError("groupdro eta must be positive");
    }
    if (group_losses.size() != w.w.size()) {
        throw ShapeError("group loss count does not match group weight count");
    }
    GroupWeights out = w;
    double total = 0.0;
    for (std::size_t g = 0; g < out.w.size(); ++g) {
        if (!std::isfinite(group_losses[g])) {
            throw NumericError("non-finite loss for group " + std::to_string(g));
        }
        out.w[g] *= std::exp(eta * group_losses[g]);
        total += out.w[g];
    }
    for (auto& x : out.w) {
        x /= total;
    }
    return out;
}

namespace {

struct RecordPass {
    std::unique_ptr<Tape> tape;
    RecordGraph graph;
};

// Forward passes for a batch; alpha > 0 adds the DP subgraph.
std::vector<RecordPass> forward_batch(std::span<const Record> batch, const ModelBundle& model,
                                      bool with_dp) {
    std::vector<RecordPass> passes;
    passes.reserve(batch.size());
    for (const Record& rec : batch) {
        RecordPass p;
        p.tape = std::make_unique<Tape>(model.params);
        p.graph = build_record_graph(model, *p.tape, rec, with_dp);
        passes.push_back(std::move(p));
    }
    return passes;
}

BatchLosses losses_of(const std::vector<RecordPass>& passes, double alpha) {
    BatchLosses out;
    for (const auto& p : passes) {
        out.task += p.tape->val(p.graph.task_loss).data[0];
        if (p.graph.dp_loss.valid()) {
            out.dp += p.tape->val(p.graph.dp_loss).data[0];
        }
    }
    const double n = static_cast<double>(passes.size());
    out.task /= n;
    out.dp /= n;
    out.total = out.task + alpha * out.dp;
    return out;
}

} // namespace

BatchLosses compute_losses(std::span<const Record> batch, const ModelBundle& model,
                           const TrainConfig& cfg) {
    if (batch.empty()) {
        throw ConfigError("compute_losses needs a non-empty batch");
    }
    const bool with_dp = cfg.alpha > 0.0;
    if (with_dp && !model.dp) {
        throw ConfigError("alpha > 0 requires a model with a domain predictor");
    }
    return losses_of(forward_batch(batch, model, with_dp), cfg.alpha);
}

double d3g_training_loss(std::span<const Record> batch, const ModelBundle& model,
                         const TrainConfig& cfg) {
    if (model.cfg.fusion != FusionKind::D3g) {
        throw ConfigError("d3g_training_loss requires d3g fusion");
    }
    return compute_losses(batch, model, cfg).total;
}

int select_checkpoint(std::span<const EpochStats> history, Selection criterion) {
    if (history.empty()) {
        throw ConfigError("select_checkpoint needs a non-empty history");
    }
    int best = 0;
    for (int e = 1; e < static_cast<int>(history.size()); ++e) {
        const EpochStats& cur = history[static_cast<std::size_t>(e)];
        const EpochStats& top = history[static_cast<std::size_t>(best)];
        bool better = false;
        switch (criterion) {
        case Selection::HighestValMetric:
            better = cur.val_avg > top.val_avg;
            break;
        case Selection::LowestValLoss:
            better = cur.val_loss < top.val_loss;
            break;
        case Selection::HighestValWorstGroup:
            better = cur.val_worst > top.val_worst;
            break;
        }
        if (better) {
            best = e;
        }
    }
    return best;
}

GroupMetrics evaluate_split(const ModelBundle& model, std::span<const Record> records) {
    std::vector<double> preds;
    std::vector<double> targets;
    std::vector<int> domains;
    preds.reserve(records.size());
    targets.reserve(records.size());
    domains.reserve(records.size());
    for (const Record& rec : records) {
        preds.push_back(predict_value(model, rec));
        targets.push_back(rec.target);
        domains.push_back(rec.domain);
    }
    return group_metrics(preds, targets, domains, model.dims.task);
}

double split_task_loss(const ModelBundle& model, std::span<const Record> records) {
    double total = 0.0;
    for (const Record& rec : records) {
        total += record_task_loss(model, rec);
    }
    return total / static_cast<double>(records.size());
}

ModelBundle train_model(const DatasetBundle& data, const TrainConfig& cfg) {
    validate(cfg);
    if (data.train.empty() || data.val.empty()) {
        throw ConfigError("training needs non-empty train and val splits");
    }
    std::shared_ptr<const FrozenTable> table;
    if (cfg.fusion != FusionKind::None && cfg.encoder == EncoderKind::FrozenTable) {
        if (cfg.frozen_features_path.empty()) {
            throw ConfigError("frozen_table encoder requires frozen_features_path");
        }
        table = std::make_shared<FrozenTable>(FrozenTable::load_csv(cfg.frozen_features_path));
    }
    ModelBundle model = build_model(cfg, dims_of(data), table);
    model.geometry = data.geometry;

    if (data.task == TaskKind::Regression) {
        double mean = 0.0;
        for (const Record& r : data.train) {
            mean += r.target;
        }
        mean /= static_cast<double>(data.train.size());
        double var = 0.0;
        for (const Record& r : data.train) {
            const double d = r.target - mean;
            var += d * d;
        }
        var /= static_cast<double>(data.train.size());
        if (var <= 0.0) {
            throw ValidationError("train targets have zero variance");
        }
        model.target_mean = mean;
        model.target_stdev = std::sqrt(var);
    }

    const bool with_dp = cfg.alpha > 0.0 && model.dp.has_value();
    if (cfg.alpha > 0.0 && !model.dp) {
        throw ConfigError("alpha > 0 requires domain labels and >= 2 domains");
    }
    AdamState task_opt(model.params, model.task_params);
    AdamState dp_opt(model.params, model.dp_params);

    GroupWeights gw = GroupWeights::uniform(std::max(model.dims.num_domains, 1));

    std::vector<int> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = static_cast<int>(i);
    }

    GradStore grads(model.params);
    std::vector<Tensor2> best_params;
    double best_value = 0.0;
    bool have_best = false;

    const auto criterion_value = [&](const EpochStats& s) {
        switch (cfg.selection) {
        case Selection::HighestValMetric:
            return s.val_avg;
        case Selection::LowestValLoss:
            return -s.val_loss;
        case Selection::HighestValWorstGroup:
            return s.val_worst;
        }
        return s.val_avg;
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at_epoch(cfg.lr0, epoch, cfg.decay);
        const double lr_dp = cfg.dp_lr_factor * lr;
        Rng shuffle_rng(mix_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        std::vector<int> idx = order;
        shuffle_rng.shuffle(idx);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < idx.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(idx.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<Record> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back(data.train[static_cast<std::size_t>(idx[i])]);
            }
            grads.zero();
            double batch_total = 0.0;
            if (cfg.objective == Objective::Erm) {
                // Forward + backward one record at a time; gradients add up
                // with the 1/|batch| mean coefficient.
                const double coef = 1.0 / static_cast<double>(batch.size());
                for (const Record& rec : batch) {
                    Tape tape(model.params);
                    const RecordGraph rg = build_record_graph(model, tape, rec, with_dp);
                    double rec_loss = tape.val(rg.task_loss).data[0];
                    std::vector<Tape::Seed> seeds;
                    seeds.push_back({rg.task_loss, coef});
                    if (with_dp) {
                        rec_loss += cfg.alpha * tape.val(rg.dp_loss).data[0];
                        seeds.push_back({rg.dp_loss, cfg.alpha * coef});
                    }
                    batch_total += rec_loss * coef;
                    tape.backward(seeds, grads);
                }
            } else {
                // GroupDRO reweights with the batch's own group losses, so
                // every forward pass must finish before seeding backward.
                auto passes = forward_batch(batch, model, with_dp);
                std::vector<double> group_loss(static_cast<std::size_t>(model.dims.num_domains),
                                               0.0);
                std::vector<int> group_count(static_cast<std::size_t>(model.dims.num_domains), 0);
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    const int g = batch[i].domain;
                    group_loss[static_cast<std::size_t>(g)] +=
                        passes[i].tape->val(passes[i].graph.task_loss).data[0];
                    ++group_count[static_cast<std::size_t>(g)];
                }
                for (std::size_t g = 0; g < group_loss.size(); ++g) {
                    if (group_count[g] > 0) {
                        group_loss[g] /= static_cast<double>(group_count[g]);
                    }
                }
                gw = groupdro_reweight(gw, group_loss, cfg.groupdro_eta);
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    const int g = batch[i].domain;
                    const double coef = gw.w[static_cast<std::size_t>(g)] /
                                        static_cast<double>(
                                            group_count[static_cast<std::size_t>(g)]);
                    std::vector<Tape::Seed> seeds;
                    seeds.push_back({passes[i].graph.task_loss, coef});
                    batch_total +=
                        coef * passes[i].tape->val(passes[i].graph.task_loss).data[0];
                    if (with_dp) {
                        seeds.push_back({passes[i].graph.dp_loss, cfg.alpha * coef});
                        batch_total +=
                            cfg.alpha * coef * passes[i].tape->val(passes[i].graph.dp_loss).data[0];
                    }
                    passes[i].tape->backward(seeds, grads);
                }
            }
            if (!std::isfinite(batch_total)) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(start / cfg.batch_size));
            }
            epoch_loss += batch_total * static_cast<double>(batch.size());
            seen += batch.size();
            task_opt.step(model.params, grads, lr);
            if (with_dp) {
                dp_opt.step(model.params, grads, lr_dp);
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(seen);
        stats.val_loss = split_task_loss(model, data.val);
        const GroupMetrics vm = evaluate_split(model, data.val);
        stats.val_avg = vm.average;
        stats.val_worst = vm.worst;
        stats.lr = lr;
        model.history.push_back(stats);

        const double value = criterion_value(stats);
        if (!have_best || value > best_value) {
            have_best = true;
            best_value = value;
            model.selected_epoch = epoch;
            best_params.clear();
            for (ParamId id = 0; id < model.params.size(); ++id) {
                best_params.push_back(model.params.value(id));
            }
        }
    }

    for (ParamId id = 0; id < model.params.size(); ++id) {
        model.params.value(id) = best_params[static_cast<std::size_t>(id)];
    }
    return model;
}

std::vector<double> default_alpha_sweep() { return {0.0, 0.001, 0.01, 0.1, 0.2}; }

std::vector<SweepRow> alpha_sweep(const DatasetBundle& data, const TrainConfig& base,
                                  std::span<const double> alphas,
                                  std::span<const std::uint64_t> seeds, int threads) {
    if (alphas.empty() || seeds.empty()) {
        throw ConfigError("alpha_sweep needs non-empty alpha and seed lists");
    }
    struct Cell {
        double alpha;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double a : alphas) {
        for (std::uint64_t s : seeds) {
            cells.push_back({a, s});
        }
    }
    std::vector<SweepRow> rows(cells.size());
    const auto run_cell = [&](std::size_t i) {
        TrainConfig cfg = base;
        cfg.alpha = cells[i].alpha;
        cfg.seed = cells[i].seed;
        const ModelBundle model = train_model(data, cfg);
        const GroupMetrics tm = evaluate_split(model, data.test);
        rows[i] = {cells[i].alpha, cells[i].seed, tm.average, tm.worst};
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            run_cell(i);
        }
        return rows;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) {
                    return;
                }
                run_cell(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return rows;
}

} // namespace geofuse
