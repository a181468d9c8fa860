#include "fate/models.hpp"

#include <cmath>

#include "fate/errors.hpp"
#include "fate/kernels.hpp"

namespace fate {

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::LogisticRegression: return "logistic_regression";
        case ModelFamily::LinearSVC: return "linear_svc";
        case ModelFamily::RandomForest: return "random_forest";
        case ModelFamily::GradientBoosting: return "gradient_boosting";
    }
    return "unknown";
}

ModelFamily family_from_name(const std::string& s) {
    if (s == "logistic_regression" || s == "lr") return ModelFamily::LogisticRegression;
    if (s == "linear_svc" || s == "svc") return ModelFamily::LinearSVC;
    if (s == "random_forest" || s == "rf") return ModelFamily::RandomForest;
    if (s == "gradient_boosting" || s == "gb") return ModelFamily::GradientBoosting;
    throw ConfigError("unknown model family: " + s);
}

void ClassifierSpec::validate() const {
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (l2 < 0) throw ConfigError("l2 must be non-negative");
    if (trees < 1) throw ConfigError("trees must be at least 1");
    if (max_depth < 0) throw ConfigError("max_depth must be non-negative");
}

nlohmann::json ClassifierSpec::to_json() const {
    return {{"family", family_name(family)}, {"learning_rate", learning_rate},
            {"epochs", epochs},              {"l2", l2},
            {"trees", trees},                {"max_depth", max_depth},
            {"seed", seed}};
}

ClassifierSpec ClassifierSpec::from_json(const nlohmann::json& j) {
    ClassifierSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("learning_rate")) s.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("epochs")) s.epochs = j.at("epochs").get<int>();
    if (j.contains("l2")) s.l2 = j.at("l2").get<double>();
    if (j.contains("trees")) s.trees = j.at("trees").get<int>();
    if (j.contains("max_depth")) s.max_depth = j.at("max_depth").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

double Tree::predict(const double* row) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
        idx = row[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                              : nodes[idx].right;
    }
    return nodes[idx].value;
}

TrainedModel train(const ClassifierSpec& spec, const Dataset& ds) {
    spec.validate();
    ds.validate();
    if (ds.d() < 1) throw ShapeError("training data has no features");
    bool has_pos = false, has_neg = false;
    for (int y : ds.y) (y ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        throw SingleClassError("training data contains a single class");
    }
    for (double v : ds.x.data) {
        if (!std::isfinite(v)) throw NumericError("non-finite feature value in training data");
    }

    switch (spec.family) {
        case ModelFamily::LogisticRegression:
            return detail::train_linear(spec, ds, /*hinge=*/false);
        case ModelFamily::LinearSVC:
            return detail::train_linear(spec, ds, /*hinge=*/true);
        case ModelFamily::RandomForest:
            return detail::train_forest(spec, ds);
        case ModelFamily::GradientBoosting:
            return detail::train_boosting(spec, ds);
    }
    throw ConfigError("unhandled model family");
}

std::vector<double> predict_scores(const TrainedModel& m, const Dataset& ds) {
    if (ds.d() != m.d) {
        throw ShapeError("feature count " + std::to_string(ds.d()) +
                         " does not match model dimension " + std::to_string(m.d));
    }
    std::vector<double> scores(ds.n());
    switch (m.family) {
        case ModelFamily::LogisticRegression:
        case ModelFamily::LinearSVC:
            for (std::size_t i = 0; i < ds.n(); ++i) {
                const double z =
                    kernels::dot(ds.x.row(i), m.weights.data(), m.d) + m.intercept;
                scores[i] = 1.0 / (1.0 + std::exp(-z));
            }
            break;
        case ModelFamily::RandomForest:
            for (std::size_t i = 0; i < ds.n(); ++i) {
                double acc = 0;
                for (const auto& tree : m.trees) acc += tree.predict(ds.x.row(i));
                scores[i] = acc / static_cast<double>(m.trees.size());
            }
            break;
        case ModelFamily::GradientBoosting:
            for (std::size_t i = 0; i < ds.n(); ++i) {
                double z = m.base_score;
                for (const auto& tree : m.trees) z += m.shrinkage * tree.predict(ds.x.row(i));
                scores[i] = 1.0 / (1.0 + std::exp(-z));
            }
            break;
    }
    return scores;
}

std::vector<int> predict_labels(const TrainedModel& m, const Dataset& ds, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0) throw Error("threshold must lie in (0,1)");
    const std::vector<double> scores = predict_scores(m, ds);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= threshold ? 1 : 0;
    return labels;
}

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j{{"family", family_name(family)}, {"d", d}, {"epochs_run", epochs_run}};
    switch (family) {
        case ModelFamily::LogisticRegression:
        case ModelFamily::LinearSVC:
            j["weights"] = weights;
            j["intercept"] = intercept;
            break;
        case ModelFamily::GradientBoosting:
            j["base_score"] = base_score;
            j["shrinkage"] = shrinkage;
            [[fallthrough]];
        case ModelFamily::RandomForest: {
            nlohmann::json trees_json = nlohmann::json::array();
            for (const auto& tree : trees) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& n : tree.nodes) {
                    nodes.push_back({{"feature", n.feature},
                                     {"threshold", n.threshold},
                                     {"left", n.left},
                                     {"right", n.right},
                                     {"value", n.value}});
                }
                trees_json.push_back(std::move(nodes));
            }
            j["trees"] = std::move(trees_json);
            break;
        }
    }
    if (!loss_trace.empty()) {
        j["final_loss"] = loss_trace.back();
    }
    return j;
}

}  // namespace fate
