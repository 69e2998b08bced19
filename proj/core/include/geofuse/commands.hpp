#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geofuse::cli {

// Exit-code contract: 0 success, 1 config error, 2 numeric failure,
// 3 data/schema error, 4 unsupported operation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitUnsupported = 4;

// Runs `fn`, mapping library exceptions onto the exit-code contract and
// printing the message to stderr.
int guarded(const std::string& command, const std::function<void()>& fn);

struct GenDataArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed; // overrides data.synthetic.seed
};
void run_gen_data(const GenDataArgs& args);

struct TrainArgs {
    std::string config_path;
    std::optional<std::string> out_dir; // overrides eval.output_dir
    std::optional<std::uint64_t> seed;  // overrides train.seed
};
void run_train(const TrainArgs& args);

struct EvalArgs {
    std::string checkpoint_path;
    std::vector<std::string> data_paths; // combined CSVs
    std::string features_path;           // joined form
    std::string labels_path;
    std::string config_path; // alternative: reuse a run config's data section
    std::string split = "test";
    std::string out_path; // optional metrics JSON
};
void run_eval(const EvalArgs& args);

struct AblateArgs {
    std::string config_path;
    std::vector<double> alphas;       // empty = default sweep list
    std::vector<std::uint64_t> seeds; // empty = config seed
    std::string out_csv = "ablation.csv";
    int threads = 1; // capped by GEOFUSE_THREADS in main
};
void run_ablate(const AblateArgs& args);

struct ClusterMapArgs {
    std::string checkpoint_path;
    int n = 100000;
    int k = 28;
    std::string format = "csv";
    std::string out_path;
    std::string mask_path;
    std::uint64_t seed = 0;
};
void run_cluster_map(const ClusterMapArgs& args);

struct ParetoArgs {
    std::vector<std::string> report_paths;
    std::string out_csv = "pareto.csv";
    std::string out_svg = "pareto.svg";
};
void run_pareto(const ParetoArgs& args);

} // namespace geofuse::cli
