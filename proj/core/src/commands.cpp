#include "geofuse/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <json.hpp>

#include "csv_util.hpp"
#include "geofuse/checkpoint.hpp"
#include "geofuse/cluster_map.hpp"
#include "geofuse/errors.hpp"
#include "geofuse/run_config.hpp"
#include "geofuse/train.hpp"
#include "json_codec.hpp"

namespace geofuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int guarded(const std::string& command, const std::function<void()>& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << command << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << command << ": invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << command << ": numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DataError& e) {
        std::cerr << command << ": data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ShapeError& e) {
        std::cerr << command << ": schema mismatch: " << e.what() << '\n';
        return kExitData;
    } catch (const UnsupportedError& e) {
        std::cerr << command << ": unsupported: " << e.what() << '\n';
        return kExitUnsupported;
    } catch (const std::exception& e) {
        std::cerr << command << ": error: " << e.what() << '\n';
        return kExitConfig;
    }
}

namespace {

DatasetBundle split_only(const DatasetBundle& b, int which) {
    DatasetBundle out;
    out.num_domains = b.num_domains;
    out.num_classes = b.num_classes;
    out.feature_dim = b.feature_dim;
    out.task = b.task;
    out.geometry = b.geometry;
    (which == 0 ? out.train : which == 1 ? out.val : out.test) =
        which == 0 ? b.train : which == 1 ? b.val : b.test;
    return out;
}

json run_config_echo_json(const RunConfig& cfg) {
    return json::parse(run_config_echo_text(cfg));
}

} // namespace

void run_gen_data(const GenDataArgs& args) {
    RunConfig cfg = load_run_config(args.config_path);
    if (!cfg.data.synthetic) {
        throw ConfigError("gen-data needs a config with a data.synthetic section");
    }
    if (args.seed) {
        cfg.data.synth.seed = *args.seed;
    }
    const DatasetBundle bundle = generate_synthetic(cfg.data.synth);
    fs::create_directories(args.out_dir);
    const std::string names[3] = {"train.csv", "val.csv", "test.csv"};
    json files = json::array();
    for (int s = 0; s < 3; ++s) {
        const std::string path = (fs::path(args.out_dir) / names[s]).string();
        write_dataset_csv(split_only(bundle, s), path);
        files.push_back(names[s]);
    }
    json manifest;
    manifest["config"] = run_config_echo_json(cfg).at("data").at("synthetic");
    manifest["files"] = std::move(files);
    manifest["rows"] = {{"train", bundle.train.size()},
                        {"val", bundle.val.size()},
                        {"test", bundle.test.size()}};
    manifest["num_domains"] = bundle.num_domains;
    manifest["num_classes"] = bundle.num_classes;
    manifest["feature_dim"] = bundle.feature_dim;
    manifest["task"] = task_kind_name(bundle.task);
    const std::string manifest_path = (fs::path(args.out_dir) / "manifest.json").string();
    codec::write_json_atomic(manifest, manifest_path);
    std::cout << "wrote " << bundle.train.size() << "/" << bundle.val.size() << "/"
              << bundle.test.size() << " rows under " << args.out_dir << '\n';
}

void run_train(const TrainArgs& args) {
    RunConfig cfg = load_run_config(args.config_path);
    if (args.seed) {
        cfg.train.seed = *args.seed;
    }
    if (args.out_dir) {
        cfg.output_dir = *args.out_dir;
    }
    const DatasetBundle data = load_data(cfg.data);
    const auto t0 = std::chrono::steady_clock::now();
    const ModelBundle model = train_model(data, cfg.train);
    const GroupMetrics test = evaluate_split(model, data.test);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(cfg.output_dir);
    const std::string ckpt_path = (fs::path(cfg.output_dir) / "checkpoint.json").string();
    save_checkpoint(model, ckpt_path);

    json report;
    report["method"] = method_tag(cfg.train);
    report["config"] = run_config_echo_json(cfg);
    report["seed"] = cfg.train.seed;
    report["selected_epoch"] = model.selected_epoch;
    report["history"] = codec::history_to_json(model.history);
    report["test_metrics"] = codec::metrics_to_json(test);
    report["wall_clock_sec"] = wall;
    const std::string report_path = (fs::path(cfg.output_dir) / "report.json").string();
    codec::write_json_atomic(report, report_path);

    std::cout << report["method"].get<std::string>() << ": selected epoch "
              << model.selected_epoch << ", test avg " << test.average << ", worst "
              << test.worst << '\n'
              << "checkpoint: " << ckpt_path << '\n'
              << "report: " << report_path << '\n';
}

void run_eval(const EvalArgs& args) {
    const ModelBundle model = load_checkpoint(args.checkpoint_path);
    DatasetBundle data;
    const int sources = static_cast<int>(!args.data_paths.empty()) +
                        static_cast<int>(!args.features_path.empty()) +
                        static_cast<int>(!args.config_path.empty());
    if (sources != 1) {
        throw ConfigError("eval needs exactly one of --data, --features/--labels, or --config");
    }
    if (!args.data_paths.empty()) {
        data = load_dataset_csv(std::span<const std::string>(args.data_paths));
    } else if (!args.features_path.empty()) {
        if (args.labels_path.empty()) {
            throw ConfigError("--features requires --labels");
        }
        data = load_dataset_csv(args.features_path, args.labels_path);
    } else {
        data = load_data(load_run_config(args.config_path).data);
    }
    if (data.feature_dim != model.dims.feature_dim) {
        throw DataError("data has " + std::to_string(data.feature_dim) +
                        " features, checkpoint expects " +
                        std::to_string(model.dims.feature_dim));
    }
    const std::vector<Record>* records = nullptr;
    if (args.split == "train") {
        records = &data.train;
    } else if (args.split == "val") {
        records = &data.val;
    } else if (args.split == "test") {
        records = &data.test;
    } else {
        throw ConfigError("unknown split '" + args.split + "'");
    }
    if (records->empty()) {
        throw DataError("split '" + args.split + "' is empty");
    }
    if (model.dims.task == TaskKind::Classification) {
        for (const Record& r : *records) {
            const int cls = static_cast<int>(r.target);
            if (r.target != std::floor(r.target) || cls < 0 || cls >= model.dims.num_classes) {
                throw DataError("record " + r.key + " target outside the checkpoint's classes");
            }
        }
    }
    const GroupMetrics metrics = evaluate_split(model, *records);
    const json out = codec::metrics_to_json(metrics);
    std::cout << out.dump(2) << '\n';
    if (!args.out_path.empty()) {
        codec::write_json_atomic(out, args.out_path);
    }
}

void run_ablate(const AblateArgs& args) {
    const RunConfig cfg = load_run_config(args.config_path);
    const DatasetBundle data = load_data(cfg.data);
    std::vector<double> alphas = args.alphas;
    if (alphas.empty()) {
        alphas = default_alpha_sweep();
    }
    std::vector<std::uint64_t> seeds = args.seeds;
    if (seeds.empty()) {
        seeds = {cfg.train.seed};
    }
    std::sort(alphas.begin(), alphas.end());
    std::sort(seeds.begin(), seeds.end());
    const std::vector<SweepRow> rows = alpha_sweep(data, cfg.train, alphas, seeds, args.threads);
    std::ofstream out(args.out_csv, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + args.out_csv);
    }
    out << "alpha,seed,avg,worst\n";
    for (const SweepRow& r : rows) {
        out << csv::format_double(r.alpha) << ',' << r.seed << ',' << csv::format_double(r.avg)
            << ',' << csv::format_double(r.worst) << '\n';
    }
    std::cout << "wrote " << rows.size() << " rows to " << args.out_csv << '\n';
}

void run_cluster_map(const ClusterMapArgs& args) {
    const ModelBundle model = load_checkpoint(args.checkpoint_path);
    std::optional<GeoMask> mask;
    if (!args.mask_path.empty()) {
        mask = GeoMask::load_geojson(args.mask_path);
    }
    const MapFormat format = map_format_from(args.format);
    const ClusterMap cm =
        build_cluster_map(model, args.n, args.k, args.seed, mask ? &*mask : nullptr);
    std::string out_path = args.out_path;
    if (out_path.empty()) {
        out_path = std::string("cluster_map.") +
                   (format == MapFormat::Csv ? "csv"
                                             : format == MapFormat::GeoJson ? "geojson" : "svg");
    }
    export_cluster_map(cm, format, out_path);
    json meta;
    meta["n"] = cm.n;
    meta["k"] = cm.k;
    meta["seed"] = cm.seed;
    meta["inertia"] = cm.inertia;
    meta["format"] = args.format;
    meta["file"] = out_path;
    if (model.geometry) {
        const double purity = cluster_purity(cm, *model.geometry);
        meta["purity"] = purity;
        std::cout << "purity " << purity << '\n';
    }
    codec::write_json_atomic(meta, out_path + ".meta.json");
    std::cout << out_path << '\n';
}

void run_pareto(const ParetoArgs& args) {
    if (args.report_paths.empty()) {
        throw ConfigError("pareto needs at least one report");
    }
    std::vector<ParetoPoint> points;
    for (const std::string& path : args.report_paths) {
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open report: " + path);
        }
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw DataError(path + ": invalid JSON: " + std::string(e.what()));
        }
        try {
            ParetoPoint p;
            p.label = doc.at("method").get<std::string>();
            p.avg = doc.at("test_metrics").at("average").get<double>();
            p.worst = doc.at("test_metrics").at("worst").get<double>();
            points.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw DataError(path + ": malformed report: " + std::string(e.what()));
        }
    }
    const std::vector<ParetoPoint> front = pareto_front(points);

    std::ofstream out(args.out_csv, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + args.out_csv);
    }
    out << "label,avg,worst\n";
    for (const ParetoPoint& p : front) {
        out << p.label << ',' << csv::format_double(p.avg) << ',' << csv::format_double(p.worst)
            << '\n';
    }

    // Scatter of all points with frontier members highlighted.
    const auto on_front = [&](const ParetoPoint& p) {
        for (const ParetoPoint& f : front) {
            if (f.label == p.label && f.avg == p.avg && f.worst == p.worst) {
                return true;
            }
        }
        return false;
    };
    double min_x = points[0].avg;
    double max_x = points[0].avg;
    double min_y = points[0].worst;
    double max_y = points[0].worst;
    for (const ParetoPoint& p : points) {
        min_x = std::min(min_x, p.avg);
        max_x = std::max(max_x, p.avg);
        min_y = std::min(min_y, p.worst);
        max_y = std::max(max_y, p.worst);
    }
    const double pad_x = (max_x - min_x) > 0 ? 0.1 * (max_x - min_x) : 1.0;
    const double pad_y = (max_y - min_y) > 0 ? 0.1 * (max_y - min_y) : 1.0;
    min_x -= pad_x;
    max_x += pad_x;
    min_y -= pad_y;
    max_y += pad_y;
    constexpr int w = 640;
    constexpr int h = 480;
    constexpr int margin = 50;
    const auto sx = [&](double v) {
        return margin + (v - min_x) / (max_x - min_x) * (w - 2 * margin);
    };
    const auto sy = [&](double v) {
        return h - margin - (v - min_y) / (max_y - min_y) * (h - 2 * margin);
    };
    std::ofstream svg(args.out_svg, std::ios::trunc);
    if (!svg) {
        throw DataError("cannot write " + args.out_svg);
    }
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
        << "\" y2=\"" << h - margin << "\" stroke=\"#333\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << h - margin << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">average</text>\n";
    svg << "<text x=\"14\" y=\"" << h / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
        << "transform=\"rotate(-90 14 " << h / 2 << ")\">worst group</text>\n";
    for (const ParetoPoint& p : points) {
        const bool hot = on_front(p);
        svg << "<circle cx=\"" << csv::format_double(sx(p.avg)) << "\" cy=\""
            << csv::format_double(sy(p.worst)) << "\" r=\"" << (hot ? 5 : 4) << "\" fill=\""
            << (hot ? "#d62728" : "#9e9e9e") << "\"/>\n";
        svg << "<text x=\"" << csv::format_double(sx(p.avg) + 7) << "\" y=\""
            << csv::format_double(sy(p.worst) - 5) << "\" font-size=\"11\">" << p.label
            << "</text>\n";
    }
    svg << "</svg>\n";
    std::cout << "frontier: " << front.size() << " of " << points.size() << " points; wrote "
              << args.out_csv << " and " << args.out_svg << '\n';
}

} // namespace geofuse::cli
