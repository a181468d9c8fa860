#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "fate/dataset.hpp"
#include "fate/metrics.hpp"
#include "fate/models.hpp"
#include "fate/rng.hpp"
#include "fate/transforms.hpp"

namespace fate {

struct GAConfig {
    int generations = 25;
    int population = 25;
    double crossover_rate = 0.25;
    double mutation_rate = 0.25;
    int l_max = 4;
    FitnessWeights weights;
    int k_folds = 5;
    std::uint64_t seed = 0;
    std::vector<Practice> catalog;  // empty -> default_catalog()
    int jobs = 1;                   // execution detail, not part of identity

    void validate() const;
    nlohmann::json to_json() const;
    static GAConfig from_json(const nlohmann::json& j);
};

std::vector<Practice> default_catalog();

struct Individual {
    Pipeline pipeline;
    std::optional<EvalReport> report;

    double fitness() const;  // NaN when unevaluated, -inf when disqualified
    bool evaluated() const { return report.has_value(); }
};

struct GenerationStat {
    int generation = 0;       // 1-based
    double best_fitness = 0;
    double mean_fitness = 0;  // over non-disqualified individuals
};

struct RunResult {
    Individual best;
    std::vector<GenerationStat> history;
    std::map<std::string, EvalReport> baseline_reports;
    double wall_time_seconds = 0;  // reported in logs, not serialized

    nlohmann::json to_json() const;
    void history_csv(std::ostream& out) const;
};

// Prepares one (train, test) fold pair; identity for the no-prep arm.
using PrepFn = std::function<std::pair<Dataset, Dataset>(
    const Dataset& train, const Dataset& test, std::uint64_t seed)>;

// Root seed for evaluating one preparation under a GA config; key is the
// pipeline's canonical serialization (or "no_prep"). Re-evaluating with the
// same root reproduces the GA's metrics exactly.
std::uint64_t evaluation_seed_root(const GAConfig& cfg, const std::string& key);

// The fold plan run() builds when no shared plan is supplied.
FoldPlan run_fold_plan(const GAConfig& cfg, const Dataset& ds);

// Shared fold-loop evaluation: prepare, train, score, aggregate. Any error on
// any fold disqualifies the whole evaluation (report.error set, fitness -inf).
// When timing is requested, only preparation + training time is accumulated.
EvalReport evaluate_prep_on_folds(const Dataset& ds, const FoldPlan& plan,
                                  const ClassifierSpec& spec, const FitnessWeights& fw,
                                  std::uint64_t seed_root, const PrepFn& prep,
                                  double* prep_train_seconds = nullptr);

// Memoizing fitness evaluator for one (dataset, model, fold plan) context.
class Evaluator {
public:
    Evaluator(const Dataset& ds, const ClassifierSpec& spec, const GAConfig& cfg,
              FoldPlan plan);

    EvalReport evaluate(const Pipeline& pipeline);
    EvalReport evaluate_no_prep();

    const FoldPlan& plan() const { return plan_; }
    std::size_t evaluations() const { return evaluations_; }  // cache misses

private:
    const Dataset& ds_;
    ClassifierSpec spec_;
    GAConfig cfg_;
    FoldPlan plan_;
    std::unordered_map<std::string, EvalReport> memo_;
    std::mutex mu_;
    std::size_t evaluations_ = 0;
};

std::vector<Individual> initialize_population(const GAConfig& cfg);

// Top ceil(N/2) indices by fitness, best first; ties broken by lower fs then
// lexicographic pipeline serialization.
std::vector<std::size_t> select_mating_pool(const std::vector<Individual>& population);

std::pair<Individual, Individual> crossover(const Individual& p1, const Individual& p2,
                                            double rate, Rng& rng, std::size_t l_max);

Individual mutate(const Individual& ind, double rate, const std::vector<Practice>& catalog,
                  Rng& rng);

RunResult run(const GAConfig& cfg, const Dataset& ds, const ClassifierSpec& spec,
              const FoldPlan* shared_plan = nullptr);

// All valid pipelines over a catalog up to l_max steps; the brute-force
// search space the GA is tested against.
std::vector<Pipeline> enumerate_pipelines(const std::vector<Practice>& catalog,
                                          std::size_t l_max);

}  // namespace fate
