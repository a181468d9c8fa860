#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fate/dataset.hpp"

namespace fate {

enum class ModelFamily { LogisticRegression, LinearSVC, RandomForest, GradientBoosting };

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& s);

struct ClassifierSpec {
    ModelFamily family = ModelFamily::LogisticRegression;
    // Linear models (LR/SVC) and boosting rounds.
    double learning_rate = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
    // Forests.
    int trees = 100;
    int max_depth = 8;
    std::uint64_t seed = 0;

    void validate() const;
    std::string name() const { return family_name(family); }

    nlohmann::json to_json() const;
    static ClassifierSpec from_json(const nlohmann::json& j);
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf: positive fraction (RF) or additive score (GB)
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const double* row) const;
};

struct TrainedModel {
    ModelFamily family = ModelFamily::LogisticRegression;
    std::size_t d = 0;

    // Linear models.
    std::vector<double> weights;
    double intercept = 0.0;

    // Ensembles.
    std::vector<Tree> trees;
    double base_score = 0.0;      // GB: initial log-odds
    double shrinkage = 0.1;       // GB learning rate

    int epochs_run = 0;
    std::vector<double> loss_trace;

    nlohmann::json to_json() const;
};

TrainedModel train(const ClassifierSpec& spec, const Dataset& ds);

// Scores are always in [0,1]: sigmoid probabilities (LR), sigmoid-squashed
// margins (SVC), mean leaf-positive fractions (RF), sigmoid additive scores
// (GB).
std::vector<double> predict_scores(const TrainedModel& m, const Dataset& ds);
std::vector<int> predict_labels(const TrainedModel& m, const Dataset& ds,
                                double threshold = 0.5);

namespace detail {

// Analytic gradient of the weighted, L2-regularized logistic loss at
// (weights, intercept); exposed for the finite-difference check.
void logistic_gradient(const Dataset& ds, const std::vector<double>& weights, double intercept,
                       double l2, std::vector<double>& grad_w, double& grad_b);
double logistic_loss(const Dataset& ds, const std::vector<double>& weights, double intercept,
                     double l2);

TrainedModel train_linear(const ClassifierSpec& spec, const Dataset& ds, bool hinge);
TrainedModel train_forest(const ClassifierSpec& spec, const Dataset& ds);
TrainedModel train_boosting(const ClassifierSpec& spec, const Dataset& ds);

}  // namespace detail

}  // namespace fate
