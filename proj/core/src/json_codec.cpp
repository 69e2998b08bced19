#include "json_codec.hpp"

#include <filesystem>
#include <fstream>

#include "geofuse/metrics.hpp"

namespace geofuse::codec {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

json train_config_to_json(const TrainConfig& cfg) {
    json j;
    j["alpha"] = cfg.alpha;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["lr0"] = cfg.lr0;
    j["decay"] = cfg.decay;
    j["dp_lr_factor"] = cfg.dp_lr_factor;
    j["seed"] = cfg.seed;
    j["fusion"] = fusion_kind_name(cfg.fusion);
    j["encoder"] = encoder_kind_name(cfg.encoder);
    j["rff_dim"] = cfg.rff_dim;
    j["rff_sigma"] = cfg.rff_sigma;
    j["frozen_features"] = cfg.frozen_features_path;
    j["d3g_lambda"] = cfg.d3g_lambda;
    j["d3g_beta"] = cfg.d3g_beta;
    j["d3g_projections"] = cfg.d3g_projections;
    j["d3g_tau"] = cfg.d3g_tau;
    j["objective"] = objective_name(cfg.objective);
    j["groupdro_eta"] = cfg.groupdro_eta;
    j["selection"] = selection_name(cfg.selection);
    return j;
}

TrainConfig train_config_from_json(const json& j, const std::string& where) {
    reject_unknown_keys(j,
                        {"alpha", "epochs", "batch_size", "lr0", "decay", "dp_lr_factor", "seed",
                         "fusion", "encoder", "rff_dim", "rff_sigma", "frozen_features",
                         "d3g_lambda", "d3g_beta", "d3g_projections", "d3g_tau", "objective",
                         "groupdro_eta", "selection"},
                        where);
    TrainConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.lr0 = j.value("lr0", cfg.lr0);
    cfg.decay = j.value("decay", cfg.decay);
    cfg.dp_lr_factor = j.value("dp_lr_factor", cfg.dp_lr_factor);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("fusion")) {
        cfg.fusion = fusion_kind_from(j.at("fusion").get<std::string>());
    }
    if (j.contains("encoder")) {
        cfg.encoder = encoder_kind_from(j.at("encoder").get<std::string>());
    }
    cfg.rff_dim = j.value("rff_dim", cfg.rff_dim);
    cfg.rff_sigma = j.value("rff_sigma", cfg.rff_sigma);
    cfg.frozen_features_path = j.value("frozen_features", cfg.frozen_features_path);
    cfg.d3g_lambda = j.value("d3g_lambda", cfg.d3g_lambda);
    cfg.d3g_beta = j.value("d3g_beta", cfg.d3g_beta);
    cfg.d3g_projections = j.value("d3g_projections", cfg.d3g_projections);
    cfg.d3g_tau = j.value("d3g_tau", cfg.d3g_tau);
    if (j.contains("objective")) {
        cfg.objective = objective_from(j.at("objective").get<std::string>());
    }
    cfg.groupdro_eta = j.value("groupdro_eta", cfg.groupdro_eta);
    if (j.contains("selection")) {
        cfg.selection = selection_from(j.at("selection").get<std::string>());
    }
    return cfg;
}

json dims_to_json(const ModelDims& dims) {
    json j;
    j["feature_dim"] = dims.feature_dim;
    j["num_classes"] = dims.num_classes;
    j["num_domains"] = dims.num_domains;
    j["task"] = task_kind_name(dims.task);
    return j;
}

ModelDims dims_from_json(const json& j, const std::string& where) {
    reject_unknown_keys(j, {"feature_dim", "num_classes", "num_domains", "task"}, where);
    ModelDims dims;
    dims.feature_dim = j.at("feature_dim").get<int>();
    dims.num_classes = j.at("num_classes").get<int>();
    dims.num_domains = j.at("num_domains").get<int>();
    dims.task = task_kind_from(j.at("task").get<std::string>());
    return dims;
}

json history_to_json(const std::vector<EpochStats>& history) {
    json arr = json::array();
    for (const EpochStats& s : history) {
        arr.push_back({{"epoch", s.epoch},
                       {"train_loss", s.train_loss},
                       {"val_loss", s.val_loss},
                       {"val_avg", s.val_avg},
                       {"val_worst", s.val_worst},
                       {"lr", s.lr}});
    }
    return arr;
}

std::vector<EpochStats> history_from_json(const json& j) {
    std::vector<EpochStats> out;
    for (const auto& e : j) {
        EpochStats s;
        s.epoch = e.at("epoch").get<int>();
        s.train_loss = e.at("train_loss").get<double>();
        s.val_loss = e.at("val_loss").get<double>();
        s.val_avg = e.at("val_avg").get<double>();
        s.val_worst = e.at("val_worst").get<double>();
        s.lr = e.at("lr").get<double>();
        out.push_back(s);
    }
    return out;
}

json geometry_to_json(const DomainGeometry& g) {
    json j;
    j["kind"] = geometry_kind_name(g.kind);
    j["num_domains"] = g.num_domains;
    json seeds = json::array();
    for (const GeoPoint& p : g.seeds) {
        seeds.push_back({p.lat, p.lon});
    }
    j["seeds"] = std::move(seeds);
    return j;
}

DomainGeometry geometry_from_json(const json& j, const std::string& where) {
    reject_unknown_keys(j, {"kind", "num_domains", "seeds"}, where);
    DomainGeometry g;
    g.kind = geometry_kind_from(j.at("kind").get<std::string>());
    g.num_domains = j.at("num_domains").get<int>();
    for (const auto& p : j.at("seeds")) {
        g.seeds.push_back(GeoPoint{p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return g;
}

json metrics_to_json(const GroupMetrics& m) {
    json per_group = json::object();
    for (const auto& [domain, stat] : m.per_group) {
        per_group[std::to_string(domain)] = {{"value", stat.value}, {"count", stat.count}};
    }
    return {{"average", m.average}, {"worst", m.worst}, {"per_group", std::move(per_group)}};
}

void write_json_atomic(const json& doc, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw DataError("cannot write " + tmp);
        }
        out << doc.dump(2) << '\n';
        if (!out) {
            throw DataError("failed while writing " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw DataError("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

} // namespace geofuse::codec
