#include "geofuse/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "geofuse/errors.hpp"
#include "json_codec.hpp"

namespace geofuse {

using nlohmann::json;

namespace {

json synth_to_json(const SynthConfig& s) {
    json j;
    j["num_domains"] = s.num_domains;
    j["num_classes"] = s.num_classes;
    j["feature_dim"] = s.feature_dim;
    j["geometry"] = geometry_kind_name(s.geometry);
    j["spurious_strength"] = s.spurious_strength;
    j["noise_sigma"] = s.noise_sigma;
    j["train_mixture"] =
        s.train_mixture.empty() ? default_train_mixture(s.num_domains) : s.train_mixture;
    json test_mix;
    if (s.test_mixture.empty()) {
        std::vector<double> uniform(static_cast<std::size_t>(s.num_domains),
                                    1.0 / s.num_domains);
        test_mix = uniform;
    } else {
        test_mix = s.test_mixture;
    }
    j["test_mixture"] = std::move(test_mix);
    j["n_train"] = s.n_train;
    j["n_val"] = s.n_val;
    j["n_test"] = s.n_test;
    j["task"] = task_kind_name(s.task);
    j["seed"] = s.seed;
    return j;
}

SynthConfig synth_from_json(const json& j) {
    codec::reject_unknown_keys(j,
                               {"num_domains", "num_classes", "feature_dim", "geometry",
                                "spurious_strength", "noise_sigma", "train_mixture",
                                "test_mixture", "n_train", "n_val", "n_test", "task", "seed"},
                               "data.synthetic");
    SynthConfig s;
    s.num_domains = j.value("num_domains", s.num_domains);
    s.num_classes = j.value("num_classes", s.num_classes);
    s.feature_dim = j.value("feature_dim", s.feature_dim);
    if (j.contains("geometry")) {
        s.geometry = geometry_kind_from(j.at("geometry").get<std::string>());
    }
    s.spurious_strength = j.value("spurious_strength", s.spurious_strength);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    if (j.contains("train_mixture") && !j.at("train_mixture").is_null()) {
        s.train_mixture = j.at("train_mixture").get<std::vector<double>>();
    }
    if (j.contains("test_mixture") && !j.at("test_mixture").is_null()) {
        s.test_mixture = j.at("test_mixture").get<std::vector<double>>();
    }
    s.n_train = j.value("n_train", s.n_train);
    s.n_val = j.value("n_val", s.n_val);
    s.n_test = j.value("n_test", s.n_test);
    if (j.contains("task")) {
        s.task = task_kind_from(j.at("task").get<std::string>());
    }
    s.seed = j.value("seed", s.seed);
    return s;
}

RunConfig run_config_from_json(const json& doc, const std::string& where) {
    codec::reject_unknown_keys(doc, {"data", "model", "train", "eval"}, where);
    RunConfig cfg;

    if (!doc.contains("data")) {
        throw ConfigError(where + ": missing 'data' section");
    }
    const json& data = doc.at("data");
    codec::reject_unknown_keys(data, {"synthetic", "csv"}, where + ".data");
    if (data.contains("synthetic") == data.contains("csv")) {
        throw ConfigError(where + ".data: exactly one of 'synthetic' or 'csv' is required");
    }
    if (data.contains("synthetic")) {
        cfg.data.synthetic = true;
        cfg.data.synth = synth_from_json(data.at("synthetic"));
    } else {
        cfg.data.synthetic = false;
        const json& csv = data.at("csv");
        codec::reject_unknown_keys(csv, {"paths", "features", "labels", "task"},
                                   where + ".data.csv");
        if (csv.contains("paths")) {
            cfg.data.csv_paths = csv.at("paths").get<std::vector<std::string>>();
        }
        cfg.data.csv_features = csv.value("features", "");
        cfg.data.csv_labels = csv.value("labels", "");
        if (csv.contains("task")) {
            cfg.data.csv_task = task_kind_from(csv.at("task").get<std::string>());
        }
        const bool combined = !cfg.data.csv_paths.empty();
        const bool joined = !cfg.data.csv_features.empty() || !cfg.data.csv_labels.empty();
        if (combined == joined) {
            throw ConfigError(where +
                              ".data.csv: give either 'paths' or a 'features'+'labels' pair");
        }
        if (joined && (cfg.data.csv_features.empty() || cfg.data.csv_labels.empty())) {
            throw ConfigError(where + ".data.csv: 'features' and 'labels' go together");
        }
    }

    if (doc.contains("model")) {
        const json& model = doc.at("model");
        codec::reject_unknown_keys(model,
                                   {"fusion", "encoder", "rff_dim", "rff_sigma",
                                    "frozen_features", "d3g_projections", "d3g_tau"},
                                   where + ".model");
        if (model.contains("fusion")) {
            cfg.train.fusion = fusion_kind_from(model.at("fusion").get<std::string>());
        }
        if (model.contains("encoder")) {
            const std::string enc = model.at("encoder").get<std::string>();
            if (enc == "none") {
                if (cfg.train.fusion != FusionKind::None) {
                    throw ConfigError(where + ".model: encoder 'none' requires fusion 'none'");
                }
            } else {
                cfg.train.encoder = encoder_kind_from(enc);
            }
        }
        cfg.train.rff_dim = model.value("rff_dim", cfg.train.rff_dim);
        cfg.train.rff_sigma = model.value("rff_sigma", cfg.train.rff_sigma);
        cfg.train.frozen_features_path =
            model.value("frozen_features", cfg.train.frozen_features_path);
        cfg.train.d3g_projections = model.value("d3g_projections", cfg.train.d3g_projections);
        cfg.train.d3g_tau = model.value("d3g_tau", cfg.train.d3g_tau);
    }

    if (doc.contains("train")) {
        const json& train = doc.at("train");
        codec::reject_unknown_keys(train,
                                   {"alpha", "epochs", "batch_size", "lr0", "decay",
                                    "dp_lr_factor", "seed", "objective", "groupdro_eta",
                                    "d3g_lambda", "d3g_beta"},
                                   where + ".train");
        if (train.contains("alpha")) {
            cfg.train.alpha = train.at("alpha").get<double>();
            if (cfg.train.fusion == FusionKind::None && cfg.train.alpha != 0.0) {
                throw ConfigError(where + ".train: alpha requires a location encoder "
                                          "(fusion is 'none')");
            }
        }
        cfg.train.epochs = train.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = train.value("batch_size", cfg.train.batch_size);
        cfg.train.lr0 = train.value("lr0", cfg.train.lr0);
        cfg.train.decay = train.value("decay", cfg.train.decay);
        cfg.train.dp_lr_factor = train.value("dp_lr_factor", cfg.train.dp_lr_factor);
        cfg.train.seed = train.value("seed", cfg.train.seed);
        if (train.contains("objective")) {
            cfg.train.objective = objective_from(train.at("objective").get<std::string>());
        }
        cfg.train.groupdro_eta = train.value("groupdro_eta", cfg.train.groupdro_eta);
        cfg.train.d3g_lambda = train.value("d3g_lambda", cfg.train.d3g_lambda);
        cfg.train.d3g_beta = train.value("d3g_beta", cfg.train.d3g_beta);
    }
    // The DP loss is only defined on top of a location encoder.
    if (cfg.train.fusion == FusionKind::None) {
        cfg.train.alpha = 0.0;
    }

    if (doc.contains("eval")) {
        const json& eval = doc.at("eval");
        codec::reject_unknown_keys(eval, {"selection", "output_dir"}, where + ".eval");
        if (eval.contains("selection")) {
            cfg.train.selection = selection_from(eval.at("selection").get<std::string>());
        }
        cfg.output_dir = eval.value("output_dir", cfg.output_dir);
    }
    return cfg;
}

} // namespace

RunConfig run_config_from_json_text(const std::string& text, const std::string& where) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": invalid JSON: " + std::string(e.what()));
    }
    return run_config_from_json(doc, where);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config: " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_config_from_json_text(text, path);
}

std::string run_config_echo_text(const RunConfig& cfg) {
    json doc;
    if (cfg.data.synthetic) {
        doc["data"]["synthetic"] = synth_to_json(cfg.data.synth);
    } else {
        json csv;
        if (!cfg.data.csv_paths.empty()) {
            csv["paths"] = cfg.data.csv_paths;
        } else {
            csv["features"] = cfg.data.csv_features;
            csv["labels"] = cfg.data.csv_labels;
        }
        if (cfg.data.csv_task) {
            csv["task"] = task_kind_name(*cfg.data.csv_task);
        }
        doc["data"]["csv"] = std::move(csv);
    }
    const json train_all = codec::train_config_to_json(cfg.train);
    json model;
    for (const char* key :
         {"fusion", "encoder", "rff_dim", "rff_sigma", "frozen_features", "d3g_projections",
          "d3g_tau"}) {
        model[key] = train_all.at(key);
    }
    if (cfg.train.fusion == FusionKind::None) {
        model["encoder"] = "none";
    }
    json train;
    for (const char* key : {"alpha", "epochs", "batch_size", "lr0", "decay", "dp_lr_factor",
                            "seed", "objective", "groupdro_eta", "d3g_lambda", "d3g_beta"}) {
        train[key] = train_all.at(key);
    }
    doc["model"] = std::move(model);
    doc["train"] = std::move(train);
    doc["eval"]["selection"] = selection_name(cfg.train.selection);
    doc["eval"]["output_dir"] = cfg.output_dir;
    return doc.dump(2);
}

DatasetBundle load_data(const DataConfig& cfg) {
    if (cfg.synthetic) {
        return generate_synthetic(cfg.synth);
    }
    if (!cfg.csv_paths.empty()) {
        DatasetBundle bundle = load_dataset_csv(std::span<const std::string>(cfg.csv_paths));
        if (cfg.csv_task && *cfg.csv_task != bundle.task) {
            if (*cfg.csv_task == TaskKind::Regression) {
                bundle.task = TaskKind::Regression;
                bundle.num_classes = 0;
            } else {
                throw DataError("config says classification but targets are not class indices");
            }
        }
        return bundle;
    }
    DatasetBundle bundle = load_dataset_csv(cfg.csv_features, cfg.csv_labels);
    if (cfg.csv_task && *cfg.csv_task != bundle.task) {
        if (*cfg.csv_task == TaskKind::Regression) {
            bundle.task = TaskKind::Regression;
            bundle.num_classes = 0;
        } else {
            throw DataError("config says classification but targets are not class indices");
        }
    }
    return bundle;
}

} // namespace geofuse
