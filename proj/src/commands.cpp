#include "rbfnet/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "rbfnet/checkpoint.hpp"
#include "rbfnet/detector.hpp"
#include "rbfnet/errors.hpp"
#include "rbfnet/generators.hpp"
#include "rbfnet/harness.hpp"
#include "rbfnet/metrics.hpp"
#include "rbfnet/model.hpp"
#include "rbfnet/rng.hpp"
#include "rbfnet/train.hpp"

namespace rbfnet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::size_t effective_classes(const RunConfig& cfg) {
    return cfg.task == "steering" ? cfg.steering.num_classes : cfg.num_classes;
}

std::string data_path(const RunConfig& cfg, const std::string& file) {
    return (fs::path(cfg.data_dir) / file).string();
}

json base_report(const RunConfig& cfg, const std::string& command) {
    json rep;
    rep["command"] = command;
    rep["seed"] = cfg.seed;
    rep["environment"] = environment_string();
    rep["config"] = cfg.raw;
    return rep;
}

int finish_report(const RunConfig& cfg, const std::string& filename, json& rep,
                  const Timer& timer) {
    rep["timing"]["seconds"] = timer.seconds();
    fs::create_directories(cfg.out_dir);
    const std::string path = (fs::path(cfg.out_dir) / filename).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report '" + path + "'");
    out << rep.dump(2) << '\n';
    std::cout << rep.dump(2) << std::endl;
    return 0;
}

void write_csv(const RunConfig& cfg, const std::string& filename, const std::string& header,
               const std::vector<std::string>& rows) {
    fs::create_directories(cfg.out_dir);
    const std::string path = (fs::path(cfg.out_dir) / filename).string();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << header << '\n';
    for (const std::string& row : rows) out << row << '\n';
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

json metrics_json(const BinaryMetrics& m) {
    return json{{"tp", m.tp},
                {"fp", m.fp},
                {"tn", m.tn},
                {"fn", m.fn},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"degenerate", m.degenerate}};
}

Dataset load_classified(const RunConfig& cfg, const std::string& file) {
    Dataset ds = read_rbds(data_path(cfg, file));
    if (ds.label_kind == LabelKind::Continuous) ds = discretize_labels(ds, cfg.steering);
    return ds;
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

}  // namespace

int cmd_gen_data(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "gen-data");
    fs::create_directories(cfg.data_dir);

    Dataset pool;
    if (cfg.task == "steering") {
        pool = gen_track_dataset(cfg.n_samples, derive_seed(cfg.seed, "gen-data"),
                                 cfg.steering.max_angle);
    } else {
        pool = gen_sign_dataset(cfg.per_class, effective_classes(cfg),
                                derive_seed(cfg.seed, "gen-data"));
    }
    SplitResult sp =
        split_dataset(pool, cfg.split_pct[0], cfg.split_pct[1], cfg.split_pct[2], cfg.seed);
    write_rbds(data_path(cfg, cfg.train_file), sp.train);
    write_rbds(data_path(cfg, cfg.val_file), sp.val);
    write_rbds(data_path(cfg, cfg.test_file), sp.test);
    json files;
    files[cfg.train_file] = sp.train.size();
    files[cfg.val_file] = sp.val.size();
    files[cfg.test_file] = sp.test.size();

    if (cfg.task == "steering") {
        // half clean, half carrying a randomized stripe; the mask marks the
        // attacked half so detection metrics have ground truth
        Dataset mixed = sp.test;
        Rng rng(derive_seed(cfg.seed, "attack-params"));
        const std::size_t n_clean = sp.test.size();
        for (std::size_t i = 0; i < n_clean; ++i) {
            LineAttackSpec atk = cfg.attack;
            atk.angle_deg = rng.uniform(-40.0, 40.0);
            atk.position = rng.uniform(0.25, 0.75);
            const Image hit = apply_line_attack(image_at(sp.test, i), atk);
            append_sample(mixed, hit, sp.test.continuous_labels[i]);
        }
        mixed.has_mask = true;
        mixed.mask.assign(n_clean, 0);
        mixed.mask.resize(2 * n_clean, 1);
        write_rbds(data_path(cfg, cfg.mixed_file), mixed);
        files[cfg.mixed_file] = mixed.size();
    }
    rep["files"] = files;
    rep["pool_size"] = pool.size();
    return finish_report(cfg, "gen_data.json", rep, timer);
}

int cmd_train(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "train");
    const Dataset train = load_classified(cfg, cfg.train_file);
    const Dataset val = load_classified(cfg, cfg.val_file);

    Network net = make_network({train.channels, train.height, train.width}, cfg.backbone);
    init_parameters(net, derive_seed(cfg.seed, "init"));
    Model model;
    if (cfg.head == "rbf") {
        model = make_rbf_model(std::move(net), effective_classes(cfg), cfg.lambda);
        init_prototypes(model, train, derive_seed(cfg.seed, "proto"));
    } else {
        model = make_softmax_model(std::move(net), effective_classes(cfg),
                                   derive_seed(cfg.seed, "head"));
    }
    if (cfg.task == "steering") {
        model.has_steering = true;
        model.steering = cfg.steering;
    }

    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, "train");
    tc.lambda = cfg.lambda;
    try {
        const TrainLog log = train_model(model, train, tc);
        json epochs = json::array();
        for (const EpochStats& e : log.epochs) {
            epochs.push_back(json{{"loss", e.mean_loss}, {"accuracy", e.accuracy}});
        }
        rep["epochs"] = epochs;
    } catch (const NumericError& e) {
        rep["error"] = e.what();
        finish_report(cfg, "train_log.json", rep, timer);
        throw;
    }
    rep["val_accuracy"] = dataset_accuracy(model, val);
    ensure_parent_dir(cfg.checkpoint_path);
    save_checkpoint(cfg.checkpoint_path, model);
    rep["checkpoint"] = cfg.checkpoint_path;
    return finish_report(cfg, "train_log.json", rep, timer);
}

int cmd_detect(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "detect");
    const Model model = load_checkpoint(cfg.checkpoint_path);
    if (model.head_kind != HeadKind::Rbf) {
        throw InputError("detection requires an rbf-head checkpoint");
    }

    double gamma = cfg.gamma;
    if (cfg.calibrate_gamma_flag) {
        const Dataset val = read_rbds(data_path(cfg, cfg.val_file));
        gamma = calibrate_gamma(model, val, cfg.target_fpr);
        rep["calibration"] = json{{"target_fpr", cfg.target_fpr}, {"gamma", gamma}};
    }
    rep["gamma"] = gamma;

    const Dataset ds = read_rbds(data_path(cfg, cfg.mixed_file));
    const std::vector<double> scores = rejection_scores(model, ds);
    const std::vector<std::size_t> preds = predict_dataset(model, ds);
    std::vector<std::uint8_t> flags(ds.size());
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        flags[i] = scores[i] >= gamma ? 1 : 0;
        flagged += flags[i];
    }
    rep["n"] = ds.size();
    rep["flagged"] = flagged;
    rep["flagged_fraction"] = static_cast<double>(flagged) / static_cast<double>(ds.size());

    std::vector<std::string> rows;
    rows.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int truth = ds.has_mask ? static_cast<int>(ds.mask[i]) : -1;
        rows.push_back(std::to_string(i) + "," + std::to_string(preds[i]) + "," +
                       fmt(scores[i]) + "," + std::to_string(int(flags[i])) + "," +
                       std::to_string(truth));
    }
    write_csv(cfg, "detections.csv", "index,predicted_class,rejection,anomaly,truth", rows);

    if (ds.has_mask) {
        rep["metrics"] = metrics_json(binary_metrics(flags, ds.mask));
        rep["auc"] = roc_auc(scores, ds.mask);
        std::vector<double> clean_scores, attacked_scores;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            (ds.mask[i] ? attacked_scores : clean_scores).push_back(scores[i]);
        }
        if (!clean_scores.empty()) {
            rep["clean"] = json{{"median", quantile(clean_scores, 0.5)},
                                {"p95", quantile(clean_scores, 0.95)}};
        }
        if (!attacked_scores.empty()) {
            rep["attacked"] = json{{"median", quantile(attacked_scores, 0.5)},
                                   {"p95", quantile(attacked_scores, 0.95)}};
        }

        // threshold sweep over the observed scores, one row per distinct value
        std::vector<std::size_t> order(ds.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        const double pos = static_cast<double>(attacked_scores.size());
        const double neg = static_cast<double>(clean_scores.size());
        std::size_t tp = 0, fp = 0;
        std::vector<std::string> roc_rows;
        for (std::size_t r = 0; r < order.size(); ++r) {
            (ds.mask[order[r]] ? tp : fp) += 1;
            const bool last_of_value =
                r + 1 == order.size() || scores[order[r + 1]] != scores[order[r]];
            if (last_of_value && pos > 0 && neg > 0) {
                roc_rows.push_back(fmt(scores[order[r]]) + "," + fmt(fp / neg) + "," +
                                   fmt(tp / pos));
            }
        }
        write_csv(cfg, "detect_roc.csv", "threshold,fpr,tpr", roc_rows);
    }
    return finish_report(cfg, "detect_report.json", rep, timer);
}

int cmd_poison(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "poison");
    const Dataset train = read_rbds(data_path(cfg, cfg.train_file));
    PoisonSpec spec = cfg.poison;
    if (cfg.poison_fraction > 0.0) {
        spec.count = static_cast<std::size_t>(
            std::llround(cfg.poison_fraction * static_cast<double>(train.size())));
    }
    const PoisonResult res = poison_dataset(train, spec);
    write_rbds(data_path(cfg, cfg.poisoned_file), res.data);
    std::size_t n_poisoned = 0;
    for (std::uint8_t m : res.mask) n_poisoned += m;
    rep["n"] = train.size();
    rep["n_poisoned"] = n_poisoned;
    rep["target_class"] = spec.target_class;
    rep["output"] = data_path(cfg, cfg.poisoned_file);
    return finish_report(cfg, "poison_report.json", rep, timer);
}

int cmd_clean(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "clean");
    const Model model = load_checkpoint(cfg.checkpoint_path);
    const Dataset poisoned = load_classified(cfg, cfg.poisoned_file);

    double beta = cfg.beta;
    if (cfg.calibrate_beta_flag) {
        beta = calibrate_beta(model, poisoned, cfg.beta_quantile);
        rep["calibration"] = json{{"beta_quantile", cfg.beta_quantile}, {"beta", beta}};
    }
    rep["beta"] = beta;
    rep["n"] = poisoned.size();

    if (poisoned.has_mask) {
        const CleaningComparison cc =
            cleaning_comparison(model, poisoned, poisoned.mask, beta, cfg.ac);
        rep["rbf"] = metrics_json(cc.rbf);
        rep["ac"] = metrics_json(cc.ac);
        const auto row = [](const std::string& name, const BinaryMetrics& m) {
            return name + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
                   std::to_string(m.tn) + "," + std::to_string(m.fn) + "," + fmt(m.precision) +
                   "," + fmt(m.recall) + "," + fmt(m.f1);
        };
        write_csv(cfg, "cleaning.csv", "method,tp,fp,tn,fn,precision,recall,f1",
                  {row("rbf", cc.rbf), row("ac", cc.ac)});
    } else {
        // no ground truth: report how much each method would discard
        const std::vector<std::uint8_t> rbf_flags = clean_dataset(model, poisoned, beta);
        const std::vector<std::uint8_t> ac_flags =
            activation_clustering_clean(model, poisoned, cfg.ac);
        std::size_t rbf_n = 0, ac_n = 0;
        for (std::uint8_t f : rbf_flags) rbf_n += f;
        for (std::uint8_t f : ac_flags) ac_n += f;
        rep["rbf"] = json{{"flagged", rbf_n}};
        rep["ac"] = json{{"flagged", ac_n}};
    }
    return finish_report(cfg, "clean_report.json", rep, timer);
}

int cmd_sweep(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "sweep");
    SweepSetup setup;
    setup.train = load_classified(cfg, cfg.train_file);
    setup.test = load_classified(cfg, cfg.test_file);
    setup.fractions = cfg.sweep_fractions;
    setup.poison = cfg.poison;
    setup.train_config = cfg.train;
    setup.train_config.lambda = cfg.lambda;
    setup.input_shape = {setup.train.channels, setup.train.height, setup.train.width};
    setup.backbone = cfg.backbone;
    setup.num_classes = effective_classes(cfg);
    setup.seed = cfg.seed;
    setup.cell_dir = (fs::path(cfg.out_dir) / "cells").string();
    fs::create_directories(setup.cell_dir);

    const SweepResult res = sweep_poison_fraction(setup);
    json cells = json::array();
    std::vector<std::string> rows;
    for (const SweepCell& cell : res.cells) {
        const auto model_json = [](const SweepModelCell& m) {
            return json{{"failed", m.failed},
                        {"success_rate", m.success_rate},
                        {"clean_accuracy", m.clean_accuracy}};
        };
        cells.push_back(json{{"fraction", cell.fraction},
                             {"n_poisoned", cell.n_poisoned},
                             {"rbf", model_json(cell.rbf)},
                             {"softmax", model_json(cell.softmax)}});
        const auto row = [&](const std::string& name, const SweepModelCell& m) {
            return fmt(cell.fraction) + "," + std::to_string(cell.n_poisoned) + "," + name +
                   "," + std::to_string(int(m.failed)) + "," + fmt(m.success_rate) + "," +
                   fmt(m.clean_accuracy);
        };
        rows.push_back(row("rbf", cell.rbf));
        rows.push_back(row("softmax", cell.softmax));
    }
    rep["cells"] = cells;
    write_csv(cfg, "sweep.csv", "fraction,n_poisoned,model,failed,success_rate,clean_accuracy",
              rows);
    return finish_report(cfg, "sweep_report.json", rep, timer);
}

int cmd_bench(const RunConfig& cfg) {
    const Timer timer;
    json rep = base_report(cfg, "bench");
    const Model model = load_checkpoint(cfg.checkpoint_path);
    if (model.head_kind != HeadKind::Rbf) {
        throw InputError("benchmarking requires an rbf-head checkpoint");
    }
    const std::vector<std::size_t>& shape = model.backbone.input_shape;

    Rng rng(derive_seed(cfg.seed, "bench-input"));
    Tensor image(shape);
    for (double& v : image.data) v = rng.next_double();
    Tensor batch({std::size_t{1}, shape[0], shape[1], shape[2]});
    batch.data = image.data;

    const Network monitor = build_monitor_network(shape, derive_seed(cfg.seed, "monitor"));

    // one network does prediction and anomaly detection in a single pass
    const auto single_op = [&] { (void)detect(model, image, cfg.gamma); };
    // the alternative: the task network predicts, a separate reconstruction
    // network of autoencoder proportions runs alongside for monitoring
    const auto dual_op = [&] {
        (void)model_predict(model, batch);
        (void)forward(monitor, batch);
    };
    const LatencyStats single = latency_benchmark(single_op, cfg.bench_repetitions);
    const LatencyStats dual = latency_benchmark(dual_op, cfg.bench_repetitions);

    rep["repetitions"] = cfg.bench_repetitions;
    const auto stats_json = [](const LatencyStats& s) {
        return json{{"mean_ms", s.mean_ms}, {"median_ms", s.median_ms}, {"p95_ms", s.p95_ms}};
    };
    rep["timing"]["single_pass"] = stats_json(single);
    rep["timing"]["dual_network"] = stats_json(dual);
    rep["timing"]["single_faster"] = single.median_ms < dual.median_ms;
    return finish_report(cfg, "bench_report.json", rep, timer);
}

}  // namespace rbfnet
