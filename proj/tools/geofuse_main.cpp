#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "geofuse/commands.hpp"

namespace {

int threads_from_env() {
    const char* env = std::getenv("GEOFUSE_THREADS");
    if (env == nullptr) {
        return 1;
    }
    const int n = std::atoi(env);
    return n > 0 ? n : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Location-conditioned predictors for geographic subpopulation shift"};
    app.require_subcommand(1);

    using namespace geofuse::cli;

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic geo-tagged dataset");
    gen_cmd->add_option("--config", gen.config_path, "Run config JSON")->required();
    gen_cmd->add_option("--out", gen.out_dir, "Output directory");
    std::uint64_t gen_seed = 0;
    auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Override data seed");

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint + report");
    train_cmd->add_option("--config", train.config_path, "Run config JSON")->required();
    std::string train_out;
    auto* train_out_opt = train_cmd->add_option("--out", train_out, "Override output directory");
    std::uint64_t train_seed = 0;
    auto* train_seed_opt = train_cmd->add_option("--seed", train_seed, "Override train seed");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint: per-group/avg/worst");
    eval_cmd->add_option("--checkpoint", eval.checkpoint_path, "Checkpoint JSON")->required();
    eval_cmd->add_option("--data", eval.data_paths, "Combined dataset CSV path(s)");
    eval_cmd->add_option("--features", eval.features_path, "Features CSV (key,f0..)");
    eval_cmd->add_option("--labels", eval.labels_path, "Labels CSV (key,split,domain,...)");
    eval_cmd->add_option("--config", eval.config_path, "Run config with a data section");
    eval_cmd->add_option("--split", eval.split, "Split to evaluate (train|val|test)");
    eval_cmd->add_option("--out", eval.out_path, "Write metrics JSON here");

    AblateArgs ablate;
    auto* ablate_cmd = app.add_subcommand("ablate", "Alpha sweep: train per (alpha, seed) cell");
    ablate_cmd->add_option("--config", ablate.config_path, "Run config JSON")->required();
    ablate_cmd->add_option("--alphas", ablate.alphas,
                           "Alpha values (default 0,0.001,0.01,0.1,0.2)");
    ablate_cmd->add_option("--seeds", ablate.seeds, "Seeds (default: config seed)");
    ablate_cmd->add_option("--out", ablate.out_csv, "Output CSV path");

    ClusterMapArgs cmap;
    auto* cmap_cmd =
        app.add_subcommand("cluster-map", "k-means map of the location embedding space");
    cmap_cmd->add_option("--checkpoint", cmap.checkpoint_path, "Checkpoint JSON")->required();
    cmap_cmd->add_option("--n", cmap.n, "Number of sampled locations");
    cmap_cmd->add_option("--k", cmap.k, "Number of clusters");
    cmap_cmd->add_option("--format", cmap.format, "csv | geojson | svg");
    cmap_cmd->add_option("--out", cmap.out_path, "Output path");
    cmap_cmd->add_option("--mask", cmap.mask_path, "GeoJSON polygon mask");
    cmap_cmd->add_option("--seed", cmap.seed, "Sampling/clustering seed");

    ParetoArgs pareto;
    auto* pareto_cmd =
        app.add_subcommand("pareto", "Frontier of (average, worst) points from run reports");
    pareto_cmd->add_option("reports", pareto.report_paths, "Report JSON paths")->required();
    pareto_cmd->add_option("--out-csv", pareto.out_csv, "Frontier CSV path");
    pareto_cmd->add_option("--out-svg", pareto.out_svg, "Scatter SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (gen_cmd->parsed()) {
        if (gen_seed_opt->count() > 0) {
            gen.seed = gen_seed;
        }
        return guarded("gen-data", [&] { run_gen_data(gen); });
    }
    if (train_cmd->parsed()) {
        if (train_seed_opt->count() > 0) {
            train.seed = train_seed;
        }
        if (train_out_opt->count() > 0) {
            train.out_dir = train_out;
        }
        return guarded("train", [&] { run_train(train); });
    }
    if (eval_cmd->parsed()) {
        return guarded("eval", [&] { run_eval(eval); });
    }
    if (ablate_cmd->parsed()) {
        ablate.threads = threads_from_env();
        return guarded("ablate", [&] { run_ablate(ablate); });
    }
    if (cmap_cmd->parsed()) {
        return guarded("cluster-map", [&] { run_cluster_map(cmap); });
    }
    if (pareto_cmd->parsed()) {
        return guarded("pareto", [&] { run_pareto(pareto); });
    }
    return kExitConfig;
}
