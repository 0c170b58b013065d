#include "rbfnet/config.hpp"

#include <cmath>
#include <fstream>

#include "rbfnet/errors.hpp"
#include "rbfnet/layer_json.hpp"

namespace rbfnet {

using nlohmann::json;

json default_config_json(const std::string& task) {
    json j;
    j["task"] = task;
    j["seed"] = 1;
    j["out_dir"] = "runs/" + task;
    j["head"] = "rbf";
    j["lambda"] = 1.0;
    j["gamma"] = 0.6;
    j["beta"] = 1.72;
    j["num_classes"] = 10;
    j["steering"] = json{{"max_angle", 30.0}, {"num_classes", 10}};
    j["backbone"] = json::array();
    j["train"] = json{{"epochs", 30}, {"batch_size", 32}, {"optimizer", "adam"}, {"lr", 1e-3}};
    j["data"] = json{{"dir", "data/" + task},
                     {"train", "train.rbds"},
                     {"val", "val.rbds"},
                     {"test", "test.rbds"},
                     {"mixed", "test_mixed.rbds"},
                     {"poisoned", "poisoned.rbds"},
                     {"n_samples", 6000},
                     {"per_class", 500},
                     {"split", json::array({70, 15, 15})}};
    j["checkpoint"] = "";
    j["poison"] = json{{"patch_h", 4},
                       {"patch_w", 4},
                       {"color", json::array({1.0, 0.9, 0.1})},
                       {"target_class", 0},
                       {"count", 0},
                       {"fraction", 0.0}};
    j["attack"] = json{{"angle_deg", 0.0}, {"position", 0.55}, {"width", 3.0}, {"intensity", 0.0}};
    j["sweep"] = json{{"fractions", json::array({0.0, 0.02, 0.05, 0.10, 0.15, 0.25, 0.35, 0.50, 0.70})}};
    j["bench"] = json{{"repetitions", 100}};
    j["ac"] = json{{"clusters", 2}, {"reduced_dim", 10}, {"restarts", 5}, {"max_iters", 100}};
    j["calibration"] = json{{"target_fpr", 0.05},
                            {"beta_quantile", 0.95},
                            {"calibrate_gamma", false},
                            {"calibrate_beta", false}};
    return j;
}

std::vector<std::size_t> input_shape_for_task(const std::string& task) {
    if (task == "steering") return {1, 64, 64};
    if (task == "signs") return {3, 32, 32};
    throw InputError("config field 'task' must be 'steering' or 'signs'");
}

std::vector<LayerSpec> default_backbone(const std::string& task) {
    if (task == "steering") {
        return {LayerSpec::conv(8, 5, 5, 2, 0),  LayerSpec::relu(),
                LayerSpec::conv(12, 3, 3, 2, 0), LayerSpec::relu(),
                LayerSpec::conv(16, 3, 3, 2, 0), LayerSpec::tanh(),
                LayerSpec::flatten()};
    }
    if (task == "signs") {
        return {LayerSpec::conv(8, 3, 3, 2, 1), LayerSpec::relu(),
                LayerSpec::residual(16, 2),     LayerSpec::residual(24, 2),
                LayerSpec::tanh(),              LayerSpec::flatten()};
    }
    throw InputError("config field 'task' must be 'steering' or 'signs'");
}

void apply_override(json& j, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw InputError("override '" + assignment + "' is not of the form path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::string pointer = "/";
    for (char ch : path) pointer += ch == '.' ? '/' : ch;
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;  // unquoted strings pass through as-is
    }
    try {
        j[json::json_pointer(pointer)] = parsed;
    } catch (const json::exception& e) {
        throw InputError("cannot apply override '" + assignment + "': " + e.what());
    }
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& req) {
    throw InputError("config field '" + field + "' " + req);
}

const json& at_path(const json& j, const std::string& field) {
    std::string pointer = "/";
    for (char ch : field) pointer += ch == '.' ? '/' : ch;
    try {
        return j.at(json::json_pointer(pointer));
    } catch (const json::exception&) {
        field_error(field, "is missing");
    }
}

template <typename T>
T get_field(const json& j, const std::string& field) {
    try {
        return at_path(j, field).get<T>();
    } catch (const InputError&) {
        throw;
    } catch (const json::exception&) {
        field_error(field, "has the wrong type");
    }
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    cfg.raw = j;
    cfg.task = get_field<std::string>(j, "task");
    if (cfg.task != "steering" && cfg.task != "signs") {
        field_error("task", "must be 'steering' or 'signs'");
    }
    cfg.seed = get_field<std::uint64_t>(j, "seed");
    cfg.out_dir = get_field<std::string>(j, "out_dir");
    if (cfg.out_dir.empty()) field_error("out_dir", "must not be empty");
    cfg.head = get_field<std::string>(j, "head");
    if (cfg.head != "rbf" && cfg.head != "softmax") {
        field_error("head", "must be 'rbf' or 'softmax'");
    }
    cfg.lambda = get_field<double>(j, "lambda");
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
        field_error("lambda", "must be positive and finite");
    }
    cfg.gamma = get_field<double>(j, "gamma");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) field_error("gamma", "must lie in (0,1)");
    cfg.beta = get_field<double>(j, "beta");
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) {
        field_error("beta", "must be positive and finite");
    }
    cfg.num_classes = get_field<std::size_t>(j, "num_classes");
    if (cfg.num_classes < 2) field_error("num_classes", "must be >= 2");
    cfg.steering.max_angle = get_field<double>(j, "steering.max_angle");
    cfg.steering.num_classes = get_field<std::size_t>(j, "steering.num_classes");
    if (!(cfg.steering.max_angle > 0.0) || !std::isfinite(cfg.steering.max_angle)) {
        field_error("steering.max_angle", "must be positive and finite");
    }
    if (cfg.steering.num_classes < 2) field_error("steering.num_classes", "must be >= 2");

    const json& bb = at_path(j, "backbone");
    if (!bb.is_array()) field_error("backbone", "must be an array of layer descriptions");
    if (bb.empty()) {
        cfg.backbone = default_backbone(cfg.task);
    } else {
        for (const auto& lj : bb) cfg.backbone.push_back(layer_from_json(lj));
    }

    cfg.train.epochs = get_field<std::size_t>(j, "train.epochs");
    cfg.train.batch_size = get_field<std::size_t>(j, "train.batch_size");
    if (cfg.train.batch_size < 1) field_error("train.batch_size", "must be >= 1");
    cfg.train.optimizer = get_field<std::string>(j, "train.optimizer");
    if (cfg.train.optimizer != "adam" && cfg.train.optimizer != "sgd") {
        field_error("train.optimizer", "must be 'adam' or 'sgd'");
    }
    cfg.train.lr = get_field<double>(j, "train.lr");
    if (!(cfg.train.lr > 0.0) || !std::isfinite(cfg.train.lr)) {
        field_error("train.lr", "must be positive and finite");
    }
    cfg.train.lambda = cfg.lambda;

    cfg.data_dir = get_field<std::string>(j, "data.dir");
    cfg.train_file = get_field<std::string>(j, "data.train");
    cfg.val_file = get_field<std::string>(j, "data.val");
    cfg.test_file = get_field<std::string>(j, "data.test");
    cfg.mixed_file = get_field<std::string>(j, "data.mixed");
    cfg.poisoned_file = get_field<std::string>(j, "data.poisoned");
    cfg.n_samples = get_field<std::size_t>(j, "data.n_samples");
    if (cfg.n_samples < 1) field_error("data.n_samples", "must be >= 1");
    cfg.per_class = get_field<std::size_t>(j, "data.per_class");
    if (cfg.per_class < 1) field_error("data.per_class", "must be >= 1");
    const auto split = get_field<std::vector<unsigned>>(j, "data.split");
    if (split.size() != 3 || split[0] + split[1] + split[2] != 100) {
        field_error("data.split", "must be three percentages summing to 100");
    }
    for (int i = 0; i < 3; ++i) cfg.split_pct[i] = split[i];

    cfg.checkpoint_path = get_field<std::string>(j, "checkpoint");
    if (cfg.checkpoint_path.empty()) cfg.checkpoint_path = cfg.out_dir + "/model.rbck";

    cfg.poison.patch_h = get_field<std::size_t>(j, "poison.patch_h");
    cfg.poison.patch_w = get_field<std::size_t>(j, "poison.patch_w");
    if (cfg.poison.patch_h < 1 || cfg.poison.patch_w < 1) {
        field_error("poison.patch_h/patch_w", "must be >= 1");
    }
    cfg.poison.color.clear();
    for (double v : get_field<std::vector<double>>(j, "poison.color")) {
        if (!(v >= 0.0 && v <= 1.0)) field_error("poison.color", "entries must lie in [0,1]");
        cfg.poison.color.push_back(static_cast<float>(v));
    }
    if (cfg.poison.color.empty()) field_error("poison.color", "must not be empty");
    cfg.poison.target_class = get_field<std::size_t>(j, "poison.target_class");
    cfg.poison.count = get_field<std::size_t>(j, "poison.count");
    cfg.poison_fraction = get_field<double>(j, "poison.fraction");
    if (!(cfg.poison_fraction >= 0.0 && cfg.poison_fraction < 1.0)) {
        field_error("poison.fraction", "must lie in [0,1)");
    }
    cfg.poison.seed = cfg.seed;

    cfg.attack.angle_deg = get_field<double>(j, "attack.angle_deg");
    cfg.attack.position = get_field<double>(j, "attack.position");
    cfg.attack.width = get_field<double>(j, "attack.width");
    cfg.attack.intensity = get_field<double>(j, "attack.intensity");
    try {
        validate_line_attack(cfg.attack);
    } catch (const InputError& e) {
        throw InputError("config field 'attack': " + std::string(e.what()));
    }

    cfg.sweep_fractions = get_field<std::vector<double>>(j, "sweep.fractions");
    for (std::size_t i = 0; i < cfg.sweep_fractions.size(); ++i) {
        const double f = cfg.sweep_fractions[i];
        if (!(f >= 0.0 && f < 1.0)) field_error("sweep.fractions", "entries must lie in [0,1)");
        if (i > 0 && !(f > cfg.sweep_fractions[i - 1])) {
            field_error("sweep.fractions", "must be strictly increasing");
        }
    }

    cfg.bench_repetitions = get_field<std::size_t>(j, "bench.repetitions");
    if (cfg.bench_repetitions < 10) field_error("bench.repetitions", "must be >= 10");

    cfg.ac.clusters = get_field<std::size_t>(j, "ac.clusters");
    if (cfg.ac.clusters < 2) field_error("ac.clusters", "must be >= 2");
    cfg.ac.reduced_dim = get_field<std::size_t>(j, "ac.reduced_dim");
    if (cfg.ac.reduced_dim < 1) field_error("ac.reduced_dim", "must be >= 1");
    cfg.ac.restarts = get_field<std::size_t>(j, "ac.restarts");
    cfg.ac.max_iters = get_field<std::size_t>(j, "ac.max_iters");
    cfg.ac.seed = cfg.seed;

    cfg.target_fpr = get_field<double>(j, "calibration.target_fpr");
    if (!(cfg.target_fpr >= 0.0 && cfg.target_fpr < 1.0)) {
        field_error("calibration.target_fpr", "must lie in [0,1)");
    }
    cfg.beta_quantile = get_field<double>(j, "calibration.beta_quantile");
    if (!(cfg.beta_quantile > 0.0 && cfg.beta_quantile <= 1.0)) {
        field_error("calibration.beta_quantile", "must lie in (0,1]");
    }
    cfg.calibrate_gamma_flag = get_field<bool>(j, "calibration.calibrate_gamma");
    cfg.calibrate_beta_flag = get_field<bool>(j, "calibration.calibrate_beta");
    return cfg;
}

RunConfig load_run_config(const std::string& config_path, const std::string& task_flag,
                          const std::vector<std::string>& overrides) {
    json file;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config '" + config_path + "'");
        try {
            in >> file;
        } catch (const json::exception& e) {
            throw ParseError("bad JSON in config '" + config_path + "': " + e.what());
        }
    }
    std::string task = "steering";
    if (!task_flag.empty()) {
        task = task_flag;
    } else if (file.contains("task")) {
        try {
            task = file.at("task").get<std::string>();
        } catch (const json::exception&) {
            field_error("task", "has the wrong type");
        }
    }
    json merged = default_config_json(task);
    if (!file.is_null()) merged.merge_patch(file);
    if (!task_flag.empty()) merged["task"] = task_flag;
    for (const std::string& o : overrides) apply_override(merged, o);
    return parse_run_config(merged);
}

}  // namespace rbfnet
