#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fate/csv.hpp"
#include "fate/dataset.hpp"
#include "fate/errors.hpp"
#include "fate/experiment.hpp"
#include "fate/kernels.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::optional<std::string> fs_mode;
};

fate::ExperimentConfig load_config(const GlobalFlags& flags) {
    if (flags.config_path.empty()) throw fate::ConfigError("--config is required");
    fate::ExperimentConfig cfg = fate::ExperimentConfig::load(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.out_dir) cfg.output_dir = *flags.out_dir;
    if (flags.fs_mode) cfg.ga.weights.fs_mode = fate::fs_mode_from_name(*flags.fs_mode);
    return cfg;
}

void add_global_flags(CLI::App* cmd, GlobalFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config JSON");
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--jobs", flags.jobs, "parallel workers");
    cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
    cmd->add_option("--fs-mode", flags.fs_mode, "fairness score mode: deviation|literal")
        ->check(CLI::IsMember({"deviation", "literal"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FATE: fairness-aware data preparation pipeline search"};
    app.require_subcommand(1);

    GlobalFlags flags;

    CLI::App* optimize = app.add_subcommand("optimize", "run the genetic search once");
    add_global_flags(optimize, flags);

    CLI::App* sweep = app.add_subcommand("sweep", "GA parameter grid with baselines");
    add_global_flags(sweep, flags);

    CLI::App* compare =
        app.add_subcommand("compare", "FATE vs pre-processing baselines with statistics");
    add_global_flags(compare, flags);

    CLI::App* baseline = app.add_subcommand("baseline", "apply one baseline and report");
    std::string baseline_name;
    add_global_flags(baseline, flags);
    baseline->add_option("--baseline", baseline_name, "fairsmote|reweighing|dir|no_prep")
        ->required();

    CLI::App* replay = app.add_subcommand("replay", "evaluate a serialized pipeline");
    std::string pipeline_path;
    add_global_flags(replay, flags);
    replay->add_option("--pipeline", pipeline_path, "pipeline JSON (e.g. best_pipeline.json)")
        ->required();

    CLI::App* metrics = app.add_subcommand("metrics", "score an existing predictions file");
    std::string predictions_path, metrics_out;
    metrics->add_option("--predictions", predictions_path,
                        "CSV with columns score,label,protected")
        ->required();
    metrics->add_option("--out", metrics_out, "optional JSON output path");
    std::string metrics_fs_mode = "deviation";
    metrics->add_option("--fs-mode", metrics_fs_mode, "deviation|literal")
        ->check(CLI::IsMember({"deviation", "literal"}));

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic biased dataset");
    std::size_t synth_n = 1000;
    double synth_bias = 0.3;
    std::uint64_t synth_seed = 0;
    std::string synth_out = "synthetic.csv";
    std::string synth_schema_out;
    synth->add_option("--n", synth_n, "rows (>= 20)");
    synth->add_option("--bias", synth_bias, "label bias in [0,1]");
    synth->add_option("--seed", synth_seed, "seed");
    synth->add_option("--out", synth_out, "CSV output path")->required();
    synth->add_option("--schema-out", synth_schema_out, "schema JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (optimize->parsed()) return fate::cmd_optimize(load_config(flags));
        if (sweep->parsed()) return fate::cmd_sweep(load_config(flags));
        if (compare->parsed()) return fate::cmd_compare(load_config(flags));
        if (baseline->parsed()) return fate::cmd_baseline(load_config(flags), baseline_name);
        if (replay->parsed()) return fate::cmd_replay(load_config(flags), pipeline_path);
        if (metrics->parsed()) {
            fate::FitnessWeights weights;
            weights.fs_mode = fate::fs_mode_from_name(metrics_fs_mode);
            return fate::cmd_metrics(predictions_path, weights, metrics_out);
        }
        if (synth->parsed()) {
            const fate::Dataset ds = fate::synthetic_biased(synth_n, synth_bias, synth_seed);
            fate::save_csv(ds, synth_out);
            if (!synth_schema_out.empty()) {
                fate::induced_schema(ds).save(synth_schema_out);
            }
            std::cout << "[synth] wrote " << ds.n() << " rows to " << synth_out << '\n';
            return 0;
        }
    } catch (const fate::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fate::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fate::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fate::EmptyDatasetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const fate::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
