#include "rbfnet/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "rbfnet/detector.hpp"
#include "rbfnet/errors.hpp"
#include "rbfnet/rng.hpp"

namespace rbfnet {

using nlohmann::json;

Dataset make_backdoor_test(const Dataset& source, const PoisonSpec& spec, std::uint64_t seed) {
    validate_dataset(source);
    if (source.label_kind != LabelKind::ClassIndex) {
        throw InputError("backdoor test construction needs class labels");
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source.class_labels[i] != spec.target_class) idx.push_back(i);
    }
    if (idx.empty()) throw InputError("no non-target samples to key");
    Dataset out = subset(source, idx);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        Image img = image_at(out, j);
        img = apply_backdoor_key(img, spec, derive_seed(seed, "test-patch", idx[j]));
        set_image(out, j, img);
    }
    return out;
}

namespace {

std::uint64_t fraction_key(double f) {
    return static_cast<std::uint64_t>(std::llround(f * 1e6));
}

json cell_to_json(const SweepCell& cell) {
    const auto side = [](const SweepModelCell& m) {
        return json{{"failed", m.failed},
                    {"success_rate", m.success_rate},
                    {"clean_accuracy", m.clean_accuracy}};
    };
    return json{{"fraction", cell.fraction},
                {"n_poisoned", cell.n_poisoned},
                {"rbf", side(cell.rbf)},
                {"softmax", side(cell.softmax)}};
}

bool cell_from_json(const json& j, SweepCell& cell) {
    try {
        cell.fraction = j.at("fraction").get<double>();
        cell.n_poisoned = j.at("n_poisoned").get<std::size_t>();
        for (const auto& [key, side] : {std::pair<const char*, SweepModelCell*>{"rbf", &cell.rbf},
                                        {"softmax", &cell.softmax}}) {
            const json& s = j.at(key);
            side->failed = s.at("failed").get<bool>();
            side->success_rate = s.at("success_rate").get<double>();
            side->clean_accuracy = s.at("clean_accuracy").get<double>();
        }
        return true;
    } catch (const json::exception&) {
        return false;
    }
}

SweepModelCell run_sweep_side(const SweepSetup& setup, const Dataset& poisoned,
                              const Dataset& keyed_test, HeadKind kind, std::uint64_t fkey) {
    SweepModelCell out;
    const char* tag = kind == HeadKind::Rbf ? "rbf" : "softmax";
    try {
        Network net = make_network(setup.input_shape, setup.backbone);
        init_parameters(net, derive_seed(setup.seed, std::string("sweep-init-") + tag, fkey));
        Model model;
        if (kind == HeadKind::Rbf) {
            model = make_rbf_model(std::move(net), setup.num_classes, setup.train_config.lambda);
            init_prototypes(model, poisoned, derive_seed(setup.seed, "sweep-proto", fkey));
        } else {
            model = make_softmax_model(std::move(net), setup.num_classes,
                                       derive_seed(setup.seed, "sweep-head", fkey));
        }
        TrainConfig tc = setup.train_config;
        tc.seed = derive_seed(setup.seed, std::string("sweep-train-") + tag, fkey);
        train_model(model, poisoned, tc);
        out.success_rate = poison_success_rate(model, keyed_test, setup.poison.target_class);
        out.clean_accuracy = dataset_accuracy(model, setup.test);
    } catch (const NumericError& e) {
        std::cerr << "sweep cell (" << tag << ") failed: " << e.what() << "\n";
        out.failed = true;
    }
    return out;
}

}  // namespace

SweepResult sweep_poison_fraction(const SweepSetup& setup) {
    validate_dataset(setup.train);
    validate_dataset(setup.test);
    if (setup.fractions.empty()) throw InputError("sweep needs at least one fraction");
    for (std::size_t i = 0; i < setup.fractions.size(); ++i) {
        const double f = setup.fractions[i];
        if (!(f >= 0.0 && f < 1.0)) throw InputError("sweep fractions must lie in [0,1)");
        if (i > 0 && !(f > setup.fractions[i - 1])) {
            throw InputError("sweep fractions must be strictly increasing");
        }
    }
    if (!setup.cell_dir.empty()) {
        std::filesystem::create_directories(setup.cell_dir);
    }
    SweepResult result;
    for (const double f : setup.fractions) {
        const std::uint64_t fkey = fraction_key(f);
        const std::string cell_path =
            setup.cell_dir.empty()
                ? std::string()
                : setup.cell_dir + "/cell_" + std::to_string(fkey) + ".json";
        if (!cell_path.empty() && std::filesystem::exists(cell_path)) {
            std::ifstream in(cell_path);
            json j;
            SweepCell cell;
            try {
                in >> j;
            } catch (const json::exception&) {
                j = json();
            }
            if (!j.is_null() && cell_from_json(j, cell)) {
                result.cells.push_back(cell);
                continue;
            }
        }
        SweepCell cell;
        cell.fraction = f;
        cell.n_poisoned = static_cast<std::size_t>(std::llround(f * static_cast<double>(setup.train.size())));

        PoisonSpec spec = setup.poison;
        spec.count = cell.n_poisoned;
        spec.seed = derive_seed(setup.seed, "sweep-poison", fkey);
        Dataset poisoned;
        if (cell.n_poisoned == 0) {
            poisoned = setup.train;
        } else {
            poisoned = poison_dataset(setup.train, spec).data;
        }
        const Dataset keyed_test =
            make_backdoor_test(setup.test, spec, derive_seed(setup.seed, "sweep-key", fkey));

        cell.rbf = run_sweep_side(setup, poisoned, keyed_test, HeadKind::Rbf, fkey);
        cell.softmax = run_sweep_side(setup, poisoned, keyed_test, HeadKind::Softmax, fkey);
        result.cells.push_back(cell);
        if (!cell_path.empty()) {
            std::ofstream out(cell_path);
            out << cell_to_json(cell).dump(2) << "\n";
        }
    }
    return result;
}

CleaningComparison cleaning_comparison(const Model& model, const Dataset& poisoned_train,
                                       const std::vector<std::uint8_t>& mask, double beta,
                                       const AcConfig& ac_config) {
    if (mask.size() != poisoned_train.size()) {
        throw InputError("mask length does not match dataset size");
    }
    CleaningComparison cmp;
    cmp.beta = beta;
    cmp.rbf = binary_metrics(clean_dataset(model, poisoned_train, beta), mask);
    cmp.ac = binary_metrics(activation_clustering_clean(model, poisoned_train, ac_config), mask);
    return cmp;
}

LatencyStats latency_benchmark(const std::function<void()>& op, std::size_t repetitions) {
    if (repetitions < 10) {
        throw InputError("latency benchmark needs at least 10 repetitions");
    }
    for (int i = 0; i < 3; ++i) op();
    std::vector<double> ms(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        op();
        const auto t1 = std::chrono::steady_clock::now();
        ms[r] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    LatencyStats stats;
    stats.repetitions = repetitions;
    double sum = 0.0;
    for (double v : ms) sum += v;
    stats.mean_ms = sum / static_cast<double>(repetitions);
    stats.median_ms = quantile(ms, 0.5);
    stats.p95_ms = quantile(ms, 0.95);
    return stats;
}

Network build_monitor_network(const std::vector<std::size_t>& input_shape,
                              std::uint64_t seed) {
    if (input_shape.size() != 3) {
        throw InputError("monitor network needs a CxHxW input shape");
    }
    struct Stage {
        std::size_t out, k, stride;
    };
    const Stage stages[] = {{24, 5, 2}, {36, 5, 2}, {48, 3, 2}, {48, 3, 1}, {64, 3, 1}};
    std::vector<LayerSpec> layers;
    auto shape = input_shape;
    for (const Stage& s : stages) {
        if (shape[1] < s.k || shape[2] < s.k) break;  // image too small for this stage
        LayerSpec conv = LayerSpec::conv(s.out, s.k, s.k, s.stride, 0);
        shape = layer_output_shape(conv, shape);
        layers.push_back(conv);
        layers.push_back(LayerSpec::relu());
    }
    layers.push_back(LayerSpec::flatten());
    layers.push_back(LayerSpec::dense(1164));
    layers.push_back(LayerSpec::relu());
    layers.push_back(LayerSpec::dense(shape_numel(input_shape)));
    Network net = make_network(input_shape, layers);
    init_parameters(net, seed);
    return net;
}

std::string environment_string() {
    std::string s;
#if defined(__clang__)
    s = "clang " __clang_version__;
#elif defined(__GNUC__)
    s = "gcc " __VERSION__;
#else
    s = "unknown compiler";
#endif
    s += ", ";
    s += std::to_string(sizeof(void*) * 8) + "-bit";
#if defined(__linux__)
    s += ", linux";
#elif defined(__APPLE__)
    s += ", darwin";
#elif defined(_WIN32)
    s += ", windows";
#endif
    return s;
}

}  // namespace rbfnet
