#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbfnet/baselines.hpp"
#include "rbfnet/generators.hpp"
#include "rbfnet/layers.hpp"
#include "rbfnet/steering.hpp"
#include "rbfnet/train.hpp"

namespace rbfnet {

// one experiment's full description. built from defaults, an optional JSON
// file, and dotted-path overrides; the merged JSON is kept for echoing into
// outputs.
struct RunConfig {
    std::string task = "steering";  // "steering" | "signs"
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string head = "rbf";  // "rbf" | "softmax"
    double lambda = 1.0;
    double gamma = 0.6;
    double beta = 1.72;
    std::size_t num_classes = 10;
    SteeringSpec steering;
    std::vector<LayerSpec> backbone;  // resolved (task default when file omits it)
    TrainConfig train;                // seed field ignored; derived from master seed

    std::string data_dir;
    std::string train_file, val_file, test_file, mixed_file, poisoned_file;
    std::string checkpoint_path;  // resolved; default <out_dir>/model.rbck
    std::size_t n_samples = 6000;
    std::size_t per_class = 500;
    unsigned split_pct[3] = {70, 15, 15};

    PoisonSpec poison;
    double poison_fraction = 0.0;  // when > 0, overrides poison.count
    LineAttackSpec attack;
    std::vector<double> sweep_fractions;
    std::size_t bench_repetitions = 100;
    AcConfig ac;
    double target_fpr = 0.05;
    double beta_quantile = 0.95;
    bool calibrate_gamma_flag = false;
    bool calibrate_beta_flag = false;

    nlohmann::json raw;
};

nlohmann::json default_config_json(const std::string& task);

std::vector<std::size_t> input_shape_for_task(const std::string& task);
std::vector<LayerSpec> default_backbone(const std::string& task);

// "a.b.c=value" applied onto the JSON tree; the value is parsed as JSON when
// possible, otherwise taken as a string
void apply_override(nlohmann::json& j, const std::string& assignment);

// validates every RunConfig invariant with a field-named error
RunConfig parse_run_config(const nlohmann::json& j);

// defaults(task) <- optional file <- overrides, then parse
RunConfig load_run_config(const std::string& config_path, const std::string& task_flag,
                          const std::vector<std::string>& overrides);

}  // namespace rbfnet
