#include "geofuse/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "geofuse/errors.hpp"
#include "json_codec.hpp"

namespace geofuse {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "geofuse-checkpoint-v1";
}

void save_checkpoint(const ModelBundle& model, const std::string& path) {
    json doc;
    doc["format"] = kFormat;
    doc["method"] = method_tag(model.cfg);
    doc["train"] = codec::train_config_to_json(model.cfg);
    doc["dims"] = codec::dims_to_json(model.dims);
    doc["target_standardization"] = {{"mean", model.target_mean},
                                     {"stdev", model.target_stdev}};
    doc["selected_epoch"] = model.selected_epoch;
    doc["history"] = codec::history_to_json(model.history);
    doc["geometry"] =
        model.geometry ? codec::geometry_to_json(*model.geometry) : json(nullptr);
    json params = json::object();
    for (ParamId id = 0; id < model.params.size(); ++id) {
        const Tensor2& t = model.params.value(id);
        params[model.params.name(id)] = {
            {"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
    }
    doc["params"] = std::move(params);
    codec::write_json_atomic(doc, path);
}

ModelBundle load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open checkpoint: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + std::string(e.what()));
    }
    if (doc.value("format", "") != kFormat) {
        throw DataError(path + ": not a " + std::string(kFormat) + " file");
    }
    const TrainConfig cfg = codec::train_config_from_json(doc.at("train"), path);
    const ModelDims dims = codec::dims_from_json(doc.at("dims"), path);
    std::shared_ptr<const FrozenTable> table;
    if (cfg.fusion != FusionKind::None && cfg.encoder == EncoderKind::FrozenTable) {
        table = std::make_shared<FrozenTable>(FrozenTable::load_csv(cfg.frozen_features_path));
    }
    ModelBundle model = build_model(cfg, dims, table);
    const auto& std_obj = doc.at("target_standardization");
    model.target_mean = std_obj.at("mean").get<double>();
    model.target_stdev = std_obj.at("stdev").get<double>();
    model.selected_epoch = doc.value("selected_epoch", -1);
    model.history = codec::history_from_json(doc.at("history"));
    if (!doc.at("geometry").is_null()) {
        model.geometry = codec::geometry_from_json(doc.at("geometry"), path);
    }
    const json& params = doc.at("params");
    if (static_cast<int>(params.size()) != model.params.size()) {
        throw DataError(path + ": checkpoint has " + std::to_string(params.size()) +
                        " parameters, model expects " + std::to_string(model.params.size()));
    }
    for (ParamId id = 0; id < model.params.size(); ++id) {
        const std::string& name = model.params.name(id);
        if (!params.contains(name)) {
            throw DataError(path + ": missing parameter '" + name + "'");
        }
        const json& p = params.at(name);
        Tensor2& dst = model.params.value(id);
        if (p.at("rows").get<int>() != dst.rows || p.at("cols").get<int>() != dst.cols) {
            throw DataError(path + ": parameter '" + name + "' has shape " +
                            std::to_string(p.at("rows").get<int>()) + "x" +
                            std::to_string(p.at("cols").get<int>()) + ", expected " +
                            dst.shape_str());
        }
        const auto values = p.at("data").get<std::vector<double>>();
        if (values.size() != dst.data.size()) {
            throw DataError(path + ": parameter '" + name + "' has wrong element count");
        }
        dst.data = values;
    }
    return model;
}

} // namespace geofuse
