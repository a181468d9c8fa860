#include <algorithm>
#include <cmath>
#include <numeric>

#include "fate/errors.hpp"
#include "fate/kernels.hpp"
#include "fate/models.hpp"
#include "fate/rng.hpp"

namespace fate::detail {

namespace {

constexpr std::uint64_t kTreeTag = 0x74726565ULL;
constexpr double kMinGain = 1e-12;

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

double gini(double pos, double total) {
    if (total <= 0) return 0.0;
    const double p = pos / total;
    return 2.0 * p * (1.0 - p);
}

// Best Gini split for one feature over the node's rows (unit row weights:
// instance weights enter the forest through the bootstrap).
void consider_gini_split(const Dataset& ds, const std::vector<std::size_t>& rows, int feature,
                         double parent_impurity, SplitChoice& best) {
    std::vector<std::pair<double, int>> vals;
    vals.reserve(rows.size());
    for (std::size_t r : rows) vals.emplace_back(ds.x.at(r, feature), ds.y[r]);
    std::sort(vals.begin(), vals.end());

    const double n = static_cast<double>(vals.size());
    double total_pos = 0;
    for (const auto& [v, y] : vals) total_pos += y;

    double left_n = 0, left_pos = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        left_n += 1;
        left_pos += vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        const double right_n = n - left_n;
        const double right_pos = total_pos - left_pos;
        const double child =
            (left_n / n) * gini(left_pos, left_n) + (right_n / n) * gini(right_pos, right_n);
        const double gain = parent_impurity - child;
        if (gain > best.gain) {
            best.gain = gain;
            best.feature = feature;
            best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        }
    }
}

int grow_classification_node(const Dataset& ds, std::vector<std::size_t>& rows, int depth,
                             int max_depth, std::size_t features_per_split, Rng& rng,
                             Tree& tree) {
    double pos = 0;
    for (std::size_t r : rows) pos += ds.y[r];
    const double n = static_cast<double>(rows.size());

    TreeNode node;
    node.value = pos / n;
    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    if (depth >= max_depth || rows.size() < 2 || pos == 0 || pos == n) return node_idx;

    // Feature subsample, then fixed iteration order for determinism.
    std::vector<int> features(ds.d());
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = 0; i < features_per_split && i + 1 < features.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, features.size() - 1);
        std::swap(features[i], features[pick(rng)]);
    }
    features.resize(std::min(features_per_split, static_cast<std::size_t>(ds.d())));
    std::sort(features.begin(), features.end());

    SplitChoice best;
    const double parent_impurity = gini(pos, n);
    for (int f : features) consider_gini_split(ds, rows, f, parent_impurity, best);
    if (best.feature < 0 || best.gain <= kMinGain) return node_idx;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
        (ds.x.at(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    if (left.empty() || right.empty()) return node_idx;

    rows.clear();
    rows.shrink_to_fit();

    const int left_idx =
        grow_classification_node(ds, left, depth + 1, max_depth, features_per_split, rng, tree);
    const int right_idx =
        grow_classification_node(ds, right, depth + 1, max_depth, features_per_split, rng, tree);
    tree.nodes[node_idx].feature = best.feature;
    tree.nodes[node_idx].threshold = best.threshold;
    tree.nodes[node_idx].left = left_idx;
    tree.nodes[node_idx].right = right_idx;
    return node_idx;
}

// Squared-error split search for boosting trees; rows carry instance weights.
struct GradientStats {
    double sum_w = 0, sum_wr = 0, sum_wh = 0;
};

void consider_sse_split(const Dataset& ds, const std::vector<std::size_t>& rows,
                        const std::vector<double>& residual, int feature, SplitChoice& best) {
    std::vector<std::pair<double, std::size_t>> vals;
    vals.reserve(rows.size());
    for (std::size_t r : rows) vals.emplace_back(ds.x.at(r, feature), r);
    std::sort(vals.begin(), vals.end());

    double total_w = 0, total_wr = 0;
    for (const auto& [v, r] : vals) {
        total_w += ds.w[r];
        total_wr += ds.w[r] * residual[r];
    }

    double left_w = 0, left_wr = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const std::size_t r = vals[i].second;
        left_w += ds.w[r];
        left_wr += ds.w[r] * residual[r];
        if (vals[i].first == vals[i + 1].first) continue;
        const double right_w = total_w - left_w;
        const double right_wr = total_wr - left_wr;
        if (left_w <= 0 || right_w <= 0) continue;
        // Variance reduction up to constants: sum of (mean^2 * weight).
        const double gain = left_wr * left_wr / left_w + right_wr * right_wr / right_w -
                            total_wr * total_wr / total_w;
        if (gain > best.gain) {
            best.gain = gain;
            best.feature = feature;
            best.threshold = (vals[i].first + vals[i + 1].first) / 2.0;
        }
    }
}

int grow_regression_node(const Dataset& ds, const std::vector<std::size_t>& rows,
                         const std::vector<double>& residual, const std::vector<double>& hessian,
                         int depth, int max_depth, Tree& tree) {
    GradientStats stats;
    for (std::size_t r : rows) {
        stats.sum_w += ds.w[r];
        stats.sum_wr += ds.w[r] * residual[r];
        stats.sum_wh += ds.w[r] * hessian[r];
    }

    TreeNode node;
    node.value = stats.sum_wr / std::max(stats.sum_wh, 1e-12);  // Newton step
    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    if (depth >= max_depth || rows.size() < 2) return node_idx;

    SplitChoice best;
    for (std::size_t f = 0; f < ds.d(); ++f) {
        consider_sse_split(ds, rows, residual, static_cast<int>(f), best);
    }
    if (best.feature < 0 || best.gain <= kMinGain) return node_idx;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
        (ds.x.at(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    if (left.empty() || right.empty()) return node_idx;

    const int left_idx =
        grow_regression_node(ds, left, residual, hessian, depth + 1, max_depth, tree);
    const int right_idx =
        grow_regression_node(ds, right, residual, hessian, depth + 1, max_depth, tree);
    tree.nodes[node_idx].feature = best.feature;
    tree.nodes[node_idx].threshold = best.threshold;
    tree.nodes[node_idx].left = left_idx;
    tree.nodes[node_idx].right = right_idx;
    return node_idx;
}

}  // namespace

TrainedModel train_forest(const ClassifierSpec& spec, const Dataset& ds) {
    TrainedModel m;
    m.family = ModelFamily::RandomForest;
    m.d = ds.d();

    const double total_w = kernels::sum(ds.w.data(), ds.n());
    double weighted_pos = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) weighted_pos += ds.w[i] * ds.y[i];

    // Depth 0 admits no splits, so the bootstrap would only add noise around
    // the weighted prior; return the prior itself.
    if (spec.max_depth == 0) {
        Tree stump;
        stump.nodes.push_back({-1, 0.0, -1, -1, weighted_pos / total_w});
        m.trees.assign(spec.trees, stump);
        return m;
    }

    const auto features_per_split = static_cast<std::size_t>(
        std::max(1.0, std::round(std::sqrt(static_cast<double>(ds.d())))));

    std::discrete_distribution<std::size_t> bootstrap(ds.w.begin(), ds.w.end());
    m.trees.resize(spec.trees);
    for (int t = 0; t < spec.trees; ++t) {
        Rng rng = make_rng(derive_seed(spec.seed, kTreeTag, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> rows(ds.n());
        for (auto& r : rows) r = bootstrap(rng);
        std::sort(rows.begin(), rows.end());
        grow_classification_node(ds, rows, 0, spec.max_depth, features_per_split, rng,
                                 m.trees[t]);
    }
    return m;
}

TrainedModel train_boosting(const ClassifierSpec& spec, const Dataset& ds) {
    TrainedModel m;
    m.family = ModelFamily::GradientBoosting;
    m.d = ds.d();
    m.shrinkage = spec.learning_rate;

    const double total_w = kernels::sum(ds.w.data(), ds.n());
    double weighted_pos = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) weighted_pos += ds.w[i] * ds.y[i];
    const double prior = std::clamp(weighted_pos / total_w, 1e-6, 1.0 - 1e-6);
    m.base_score = std::log(prior / (1.0 - prior));

    std::vector<double> score(ds.n(), m.base_score);
    std::vector<double> residual(ds.n()), hessian(ds.n());
    std::vector<std::size_t> all_rows(ds.n());
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (int round = 0; round < spec.epochs; ++round) {
        double loss = 0;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const double p = 1.0 / (1.0 + std::exp(-score[i]));
            residual[i] = ds.y[i] - p;
            hessian[i] = std::max(p * (1.0 - p), 1e-12);
            const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
            loss += ds.w[i] * (ds.y[i] ? -std::log(pc) : -std::log(1.0 - pc));
        }
        m.loss_trace.push_back(loss / total_w);

        Tree tree;
        grow_regression_node(ds, all_rows, residual, hessian, 0, /*max_depth=*/2, tree);
        for (std::size_t i = 0; i < ds.n(); ++i) {
            score[i] += m.shrinkage * tree.predict(ds.x.row(i));
        }
        m.trees.push_back(std::move(tree));
    }
    m.epochs_run = spec.epochs;
    return m;
}

}  // namespace fate::detail
