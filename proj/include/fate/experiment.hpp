#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fate/baselines.hpp"
#include "fate/dataset.hpp"
#include "fate/ga.hpp"
#include "fate/metrics.hpp"
#include "fate/models.hpp"

namespace fate {

inline constexpr const char* kResultsSchemaVersion = "fate-csv-v1";

struct BaselineArm {
    std::string name;  // fairsmote | reweighing | dir
    SmoteParams smote;
    RepairLevel repair;

    void validate() const;
    nlohmann::json to_json() const;
    static BaselineArm from_json(const nlohmann::json& j);
};

struct SweepGrid {
    std::vector<int> population{25, 50};
    std::vector<int> generations{25, 50};
    std::vector<double> crossover_rate{0.25, 0.75};
    std::vector<double> mutation_rate{0.25, 0.75};

    void validate() const;
    nlohmann::json to_json() const;
    static SweepGrid from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
    std::string dataset_csv;   // resolved against the config file's directory
    std::string schema_path;
    std::string dataset_name;
    std::vector<ClassifierSpec> models;
    GAConfig ga;
    SweepGrid sweep;
    std::vector<BaselineArm> baselines;
    int repetitions = 10;
    std::string output_dir = "results";
    std::uint64_t seed = 0;
    int jobs = 1;

    void validate() const;
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir);

    // Canonical serialization of everything that affects results (paths as
    // written; output/jobs excluded), hashed for replay bookkeeping.
    nlohmann::json identity_json() const;
    std::string config_hash() const;
};

struct ComparisonRecord {
    std::string arm;  // fate | fairsmote | reweighing | dir | no_prep
    std::string dataset;
    std::string model;
    int repetition = 0;
    std::uint64_t seed = 0;
    double execution_time_seconds = 0;
    EvalReport report;
    std::string detail;  // fate: winning pipeline serialization
    std::string error;
};

// Evaluates one comparison cell: the arm's preparation applied under the
// repetition's shared fold plan, with preparation + training wall time.
// For the fate arm the GA search runs first (untimed) and the returned
// record times its best pipeline, mirroring how the baselines are timed.
ComparisonRecord run_compare_cell(const ExperimentConfig& cfg, const Dataset& ds,
                                  const std::string& arm, const ClassifierSpec& model,
                                  int repetition);

// CSV tables are versioned; appending to a file whose header differs is an
// error.
void write_csv_table(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, bool append = false);

int cmd_optimize(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);
int cmd_baseline(const ExperimentConfig& cfg, const std::string& baseline_name);
// Replays a serialized pipeline (e.g. an optimize run's best_pipeline.json)
// under the config's dataset, folds and first model.
int cmd_replay(const ExperimentConfig& cfg, const std::string& pipeline_json_path);
int cmd_metrics(const std::string& predictions_csv, const FitnessWeights& weights,
                const std::string& out_path);

}  // namespace fate
