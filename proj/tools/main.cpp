// command-line front end: one subcommand per experiment step, all behavior
// driven by a JSON config assembled from task defaults, an optional file,
// and repeatable dotted-path overrides.
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbfnet/commands.hpp"
#include "rbfnet/config.hpp"
#include "rbfnet/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string task;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "JSON config file");
    sub->add_option("--task", args.task, "task preset: steering | signs");
    sub->add_option("--set", args.overrides,
                    "config override as dotted.path=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deep-rbf steering classifier with built-in anomaly rejection"};
    app.require_subcommand(1);

    CommonArgs args;
    std::function<int(const rbfnet::RunConfig&)> selected;
    const std::pair<const char*, std::pair<const char*, int (*)(const rbfnet::RunConfig&)>>
        commands[] = {
            {"gen-data", {"generate datasets and write them under the data dir",
                          &rbfnet::cmd_gen_data}},
            {"train", {"train a model and write a checkpoint plus log", &rbfnet::cmd_train}},
            {"detect", {"score a dataset for anomalies with a trained model",
                        &rbfnet::cmd_detect}},
            {"poison", {"stamp backdoor keys into a training set", &rbfnet::cmd_poison}},
            {"clean", {"flag suspect training samples with both cleaning methods",
                       &rbfnet::cmd_clean}},
            {"sweep", {"train both heads across poison fractions", &rbfnet::cmd_sweep}},
            {"bench", {"time single-pass detection against a two-network setup",
                       &rbfnet::cmd_bench}},
        };
    for (const auto& [name, desc_fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc_fn.first);
        add_common(sub, args);
        sub->callback([&selected, fn = desc_fn.second] { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const rbfnet::RunConfig cfg =
            rbfnet::load_run_config(args.config_path, args.task, args.overrides);
        return selected(cfg);
    } catch (const rbfnet::InputError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const rbfnet::ShapeError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const rbfnet::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const rbfnet::IoError& e) {
        std::cerr << e.what() << '\n';
        return 3;
    } catch (const rbfnet::NumericError& e) {
        std::cerr << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
