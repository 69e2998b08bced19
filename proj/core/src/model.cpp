#include "geofuse/model.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

ModelDims dims_of(const DatasetBundle& data) {
    ModelDims d;
    d.feature_dim = data.feature_dim;
    d.num_classes = data.num_classes;
    d.num_domains = data.num_domains;
    d.task = data.task;
    return d;
}

void validate(const TrainConfig& cfg) {
    if (cfg.alpha < 0.0) {
        throw ConfigError("alpha must be >= 0");
    }
    if (cfg.epochs < 1) {
        throw ConfigError("epochs must be >= 1");
    }
    if (cfg.batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (cfg.lr0 <= 0.0) {
        throw ConfigError("lr0 must be positive");
    }
    if (cfg.decay <= 0.0 || cfg.decay > 1.0) {
        throw ConfigError("decay must be in (0, 1]");
    }
    if (cfg.dp_lr_factor < 0.0) {
        throw ConfigError("dp_lr_factor must be >= 0");
    }
    if (cfg.d3g_lambda < 0.0 || cfg.d3g_beta < 0.0 || cfg.d3g_beta > 1.0) {
        throw ConfigError("d3g_lambda must be >= 0 and d3g_beta within [0, 1]");
    }
    if (cfg.groupdro_eta <= 0.0 && cfg.objective == Objective::GroupDro) {
        throw ConfigError("groupdro_eta must be positive");
    }
    if (cfg.objective == Objective::GroupDro && cfg.fusion != FusionKind::None) {
        throw ConfigError("groupdro objective applies to the image-only model (fusion none)");
    }
}

std::string method_tag(const TrainConfig& cfg) {
    if (cfg.fusion == FusionKind::None) {
        return cfg.objective == Objective::GroupDro ? "GroupDRO" : "ERM";
    }
    std::string base;
    switch (cfg.fusion) {
    case FusionKind::Concat:
        base = "Concat";
        break;
    case FusionKind::Film:
        base = "FiLM";
        break;
    case FusionKind::GeoPriors:
        base = "GeoPriors";
        break;
    case FusionKind::D3g:
        base = "D3G";
        break;
    case FusionKind::None:
        break;
    }
    return cfg.alpha > 0.0 ? base + "+DP" : base;
}

ModelBundle build_model(const TrainConfig& cfg, const ModelDims& dims,
                        std::shared_ptr<const FrozenTable> table) {
    validate(cfg);
    if (dims.feature_dim < 1) {
        throw ConfigError("model needs feature_dim >= 1");
    }
    if (dims.task == TaskKind::Classification && dims.num_classes < 2) {
        throw ConfigError("classification needs at least 2 classes");
    }
    if (dims.task == TaskKind::Regression && cfg.fusion == FusionKind::GeoPriors) {
        throw ConfigError("geopriors fusion applies to classification tasks only");
    }
    ModelBundle m;
    m.cfg = cfg;
    m.dims = dims;
    const int out_dim = dims.output_dim();

    if (cfg.fusion != FusionKind::None) {
        EncoderConfig enc_cfg;
        enc_cfg.kind = cfg.encoder;
        enc_cfg.rff_dim = cfg.rff_dim;
        enc_cfg.rff_sigma = cfg.rff_sigma;
        enc_cfg.table = table;
        enc_cfg.num_domains = dims.num_domains;
        if (cfg.encoder == EncoderKind::FrozenTable && !table) {
            throw ConfigError("frozen_table encoder requires frozen_features_path");
        }
        m.encoder = make_location_encoder(m.params, enc_cfg, cfg.seed);
    }

    Rng init(mix_seed(cfg.seed, "init"));
    switch (cfg.fusion) {
    case FusionKind::None:
        m.task_head = make_linear(m.params, init, "task_head", dims.feature_dim, out_dim, false);
        break;
    case FusionKind::Concat:
        m.concat = make_concat_head(m.params, init, dims.feature_dim, kEmbedDim, out_dim);
        break;
    case FusionKind::Film:
        m.film = make_film_head(m.params, init, dims.feature_dim, kEmbedDim, out_dim);
        break;
    case FusionKind::GeoPriors:
        m.geopriors = make_geopriors_head(m.params, init, dims.feature_dim, kEmbedDim,
                                          dims.num_classes);
        break;
    case FusionKind::D3g:
        if (dims.num_domains < 2) {
            throw ConfigError("d3g fusion requires a dataset with >= 2 domains");
        }
        m.d3g = make_d3g_head(m.params, init, dims.feature_dim, kEmbedDim, out_dim,
                              dims.num_domains, cfg.d3g_projections, cfg.d3g_tau);
        break;
    }
    for (ParamId id = 0; id < m.params.size(); ++id) {
        m.task_params.push_back(id);
    }
    if (m.encoder && dims.num_domains >= 2) {
        Rng dp_rng(mix_seed(cfg.seed, "dp_init"));
        m.dp = make_domain_predictor(m.params, dp_rng, dims.num_domains);
        collect_params(m.dp->layer, m.dp_params);
    }
    return m;
}

double standardized_target(const ModelBundle& m, double target) {
    return (target - m.target_mean) / m.target_stdev;
}

RecordGraph build_record_graph(const ModelBundle& m, Tape& tape, const Record& rec,
                               bool with_dp) {
    if (static_cast<int>(rec.features.size()) != m.dims.feature_dim) {
        throw ShapeError("record " + rec.key + " has " + std::to_string(rec.features.size()) +
                         " features, model expects " + std::to_string(m.dims.feature_dim));
    }
    RecordGraph g;
    Var img = tape.input(Tensor2(m.dims.feature_dim, 1, rec.features));

    Var emb{};
    if (m.encoder) {
        EncoderInput in;
        in.point = rec.point;
        in.key = rec.key;
        in.domain = rec.domain;
        emb = encode_location(*m.encoder, tape, in);
    }

    const bool classify = m.dims.task == TaskKind::Classification;
    const int target_class = classify ? static_cast<int>(rec.target) : -1;
    if (classify && (target_class < 0 || target_class >= m.dims.num_classes)) {
        throw ValidationError("record " + rec.key + " target class out of range");
    }
    const auto task_loss_of = [&](Var pred) {
        if (classify) {
            return tape.cross_entropy(pred, target_class);
        }
        return tape.mse(pred, Tensor2(1, 1, {standardized_target(m, rec.target)}));
    };

    switch (m.cfg.fusion) {
    case FusionKind::None:
        g.prediction = forward(*m.task_head, tape, img);
        g.task_loss = task_loss_of(g.prediction);
        break;
    case FusionKind::Concat:
        g.prediction = fuse_concat(*m.concat, tape, img, emb);
        g.task_loss = task_loss_of(g.prediction);
        break;
    case FusionKind::Film:
        g.prediction = fuse_film(*m.film, tape, img, emb);
        g.task_loss = task_loss_of(g.prediction);
        break;
    case FusionKind::GeoPriors: {
        // Image scorer learns with cross entropy; the location prior with
        // its class-weighted sigmoid loss. Prediction combines them at
        // evaluation time (see predict_value).
        Var img_logits = forward(m.geopriors->h_image, tape, img);
        Var loc_logits = forward(m.geopriors->h_loc, tape, emb);
        g.task_loss = tape.add(tape.cross_entropy(img_logits, target_class),
                               tape.geoprior_nll(loc_logits, target_class));
        break;
    }
    case FusionKind::D3g: {
        const auto& head = *m.d3g;
        if (rec.domain < 0 || rec.domain >= head.num_heads) {
            throw ValidationError("record " + rec.key + " domain out of range for d3g heads");
        }
        // Own-domain head loss.
        Var own = forward(head.heads[static_cast<std::size_t>(rec.domain)], tape, img);
        g.d3g_pred_loss = task_loss_of(own);
        // Consistency loss: other heads mixed by their (interpolated,
        // renormalized) relation to this record's location.
        std::vector<Var> rels;
        std::vector<int> others;
        for (int j = 0; j < head.num_heads; ++j) {
            if (j == rec.domain) {
                continue;
            }
            others.push_back(j);
            rels.push_back(
                d3g_training_relation(head, tape, emb, j, false, m.cfg.d3g_beta));
        }
        Var weights = tape.softmax(tape.scale(tape.stack_scalars(rels), 1.0 / head.tau));
        Var ensemble{};
        for (std::size_t idx = 0; idx < others.size(); ++idx) {
            Var term = tape.scale_by(
                tape.select(weights, static_cast<int>(idx)),
                forward(head.heads[static_cast<std::size_t>(others[idx])], tape, img));
            ensemble = (idx == 0) ? term : tape.add(ensemble, term);
        }
        g.d3g_rel_loss = task_loss_of(ensemble);
        g.task_loss = tape.add(g.d3g_pred_loss, tape.scale(g.d3g_rel_loss, m.cfg.d3g_lambda));
        break;
    }
    }

    if (with_dp) {
        if (!m.dp) {
            throw ConfigError("domain prediction loss requested but the model has no DP head");
        }
        if (rec.domain < 0 || rec.domain >= m.dims.num_domains) {
            throw ConfigError("record " + rec.key + " lacks a valid domain label for DP loss");
        }
        g.dp_loss = tape.cross_entropy(predict_domain(*m.dp, tape, emb), rec.domain);
    }
    return g;
}

double predict_value(const ModelBundle& m, const Record& rec) {
    Tape tape(m.params);
    if (m.cfg.fusion == FusionKind::GeoPriors) {
        Var img = tape.input(Tensor2(m.dims.feature_dim, 1, rec.features));
        EncoderInput in;
        in.point = rec.point;
        in.key = rec.key;
        in.domain = rec.domain;
        Var emb = encode_location(*m.encoder, tape, in);
        const Tensor2 img_scores =
            softmax_vec(tape.val(forward(m.geopriors->h_image, tape, img)));
        const Tensor2 loc_logits = tape.val(forward(m.geopriors->h_loc, tape, emb));
        return static_cast<double>(geoprior_score(img_scores, loc_logits).predicted);
    }
    Var pred{};
    Var img = tape.input(Tensor2(m.dims.feature_dim, 1, rec.features));
    Var emb{};
    if (m.encoder) {
        EncoderInput in;
        in.point = rec.point;
        in.key = rec.key;
        in.domain = rec.domain;
        emb = encode_location(*m.encoder, tape, in);
    }
    switch (m.cfg.fusion) {
    case FusionKind::None:
        pred = forward(*m.task_head, tape, img);
        break;
    case FusionKind::Concat:
        pred = fuse_concat(*m.concat, tape, img, emb);
        break;
    case FusionKind::Film:
        pred = fuse_film(*m.film, tape, img, emb);
        break;
    case FusionKind::D3g:
        pred = fuse_d3g(*m.d3g, tape, img, emb);
        break;
    case FusionKind::GeoPriors:
        break; // handled above
    }
    const Tensor2& v = tape.val(pred);
    if (m.dims.task == TaskKind::Classification) {
        int best = 0;
        for (int i = 1; i < v.rows; ++i) {
            if (v.data[static_cast<std::size_t>(i)] > v.data[static_cast<std::size_t>(best)]) {
                best = i;
            }
        }
        return static_cast<double>(best);
    }
    return v.data[0] * m.target_stdev + m.target_mean;
}

double record_task_loss(const ModelBundle& m, const Record& rec) {
    Tape tape(m.params);
    return tape.val(build_record_graph(m, tape, rec, false).task_loss).data[0];
}

const char* selection_name(Selection s) {
    switch (s) {
    case Selection::HighestValMetric:
        return "highest_val_metric";
    case Selection::LowestValLoss:
        return "lowest_val_loss";
    case Selection::HighestValWorstGroup:
        return "highest_val_worst_group";
    }
    return "?";
}

Selection selection_from(const std::string& name) {
    if (name == "highest_val_metric") {
        return Selection::HighestValMetric;
    }
    if (name == "lowest_val_loss") {
        return Selection::LowestValLoss;
    }
    if (name == "highest_val_worst_group") {
        return Selection::HighestValWorstGroup;
    }
    throw ConfigError("unknown selection criterion: " + name);
}

const char* objective_name(Objective o) {
    return o == Objective::Erm ? "erm" : "groupdro";
}

Objective objective_from(const std::string& name) {
    if (name == "erm") {
        return Objective::Erm;
    }
    if (name == "groupdro") {
        return Objective::GroupDro;
    }
    throw ConfigError("unknown objective: " + name);
}

} // namespace geofuse
