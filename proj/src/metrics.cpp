#include "fate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fate/errors.hpp"

namespace fate {

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size()) throw ShapeError("prediction/label size mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] == 1) {
            preds[i] == 1 ? ++c.tp : ++c.fn;
        } else {
            preds[i] == 1 ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

std::pair<double, double> precision_recall(const ConfusionCounts& c) {
    const double precision = (c.tp + c.fp) > 0 ? c.tp / (c.tp + c.fp) : 0.0;
    const double recall = (c.tp + c.fn) > 0 ? c.tp / (c.tp + c.fn) : 0.0;
    return {precision, recall};
}

double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw ShapeError("score/label size mismatch");
    const double positives =
        static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0) throw UndefinedMetricError("PR-AUC needs at least one positive label");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (scores[i] != scores[j]) return scores[i] > scores[j];
        return i < j;
    });

    double auc = 0.0;
    double tp = 0.0, fp = 0.0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            labels[order[i]] == 1 ? ++tp : ++fp;
            ++i;
        }
        const double precision = tp / (tp + fp);
        const double recall = tp / positives;
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return auc;
}

GroupFairness group_fairness(const std::vector<int>& preds, const std::vector<int>& labels,
                             const std::vector<int>& a) {
    if (preds.size() != labels.size() || preds.size() != a.size()) {
        throw ShapeError("prediction/label/group size mismatch");
    }
    double n0 = 0, n1 = 0;        // group sizes
    double fav0 = 0, fav1 = 0;    // favorable predictions
    double pos0 = 0, pos1 = 0;    // actual positives
    double tp0 = 0, tp1 = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (a[i] == 0) {
            ++n0;
            fav0 += preds[i];
            if (labels[i] == 1) {
                ++pos0;
                tp0 += preds[i];
            }
        } else {
            ++n1;
            fav1 += preds[i];
            if (labels[i] == 1) {
                ++pos1;
                tp1 += preds[i];
            }
        }
    }
    if (n0 == 0 || n1 == 0) throw DegenerateGroupError("both protected groups must be present");
    if (pos0 == 0 || pos1 == 0) {
        throw DegenerateGroupError("EOD needs positive labels in both groups");
    }

    GroupFairness g;
    const double rate0 = fav0 / n0;
    const double rate1 = fav1 / n1;
    g.spd = rate0 - rate1;
    g.eod = tp0 / pos0 - tp1 / pos1;
    if (rate1 == 0.0) {
        g.di = rate0 == 0.0 ? 1.0 : kDiCap;
    } else {
        g.di = std::min(rate0 / rate1, kDiCap);
    }
    return g;
}

std::string fs_mode_name(FsMode m) { return m == FsMode::Deviation ? "deviation" : "literal"; }

FsMode fs_mode_from_name(const std::string& s) {
    if (s == "deviation") return FsMode::Deviation;
    if (s == "literal") return FsMode::Literal;
    throw ConfigError("unknown fs_mode: " + s);
}

void FitnessWeights::validate() const {
    if (w_perf < 0 || w_fair < 0) throw ConfigError("fitness weights must be non-negative");
    if (w_perf + w_fair <= 0) throw ConfigError("fitness weights must not both be zero");
}

nlohmann::json FitnessWeights::to_json() const {
    return {{"w_perf", w_perf}, {"w_fair", w_fair}, {"fs_mode", fs_mode_name(fs_mode)}};
}

FitnessWeights FitnessWeights::from_json(const nlohmann::json& j) {
    FitnessWeights fw;
    if (j.contains("w_perf")) fw.w_perf = j.at("w_perf").get<double>();
    if (j.contains("w_fair")) fw.w_fair = j.at("w_fair").get<double>();
    if (j.contains("fs_mode")) fw.fs_mode = fs_mode_from_name(j.at("fs_mode").get<std::string>());
    fw.validate();
    return fw;
}

double fairness_score(double spd, double eod, double di, FsMode mode) {
    if (mode == FsMode::Literal) return std::abs(spd) + std::abs(eod) + std::abs(di);
    return std::abs(spd) + std::abs(eod) + std::min(1.0, std::abs(1.0 - di));
}

double fitness_value(double ps, double fs, const FitnessWeights& fw) {
    return fw.w_perf * ps - fw.w_fair * fs;
}

FitnessBreakdown fitness(double pr_auc_value, double spd, double eod, double di,
                         const FitnessWeights& fw) {
    fw.validate();
    if (!std::isfinite(pr_auc_value) || !std::isfinite(spd) || !std::isfinite(eod) ||
        !std::isfinite(di)) {
        throw NumericError("fitness constituents must be finite");
    }
    FitnessBreakdown b;
    b.ps = pr_auc_value;
    b.fs = fairness_score(spd, eod, di, fw.fs_mode);
    b.fitness = fitness_value(b.ps, b.fs, fw);
    return b;
}

nlohmann::json FoldMetrics::to_json() const {
    return {{"precision", precision}, {"recall", recall}, {"pr_auc", pr_auc},
            {"spd", spd},             {"eod", eod},       {"di", di},
            {"ps", ps},               {"fs", fs},         {"fitness", fitness}};
}

FoldMetrics FoldMetrics::from_json(const nlohmann::json& j) {
    FoldMetrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.pr_auc = j.at("pr_auc").get<double>();
    m.spd = j.at("spd").get<double>();
    m.eod = j.at("eod").get<double>();
    m.di = j.at("di").get<double>();
    m.ps = j.at("ps").get<double>();
    m.fs = j.at("fs").get<double>();
    m.fitness = j.at("fitness").get<double>();
    return m;
}

EvalReport aggregate_folds(const std::vector<FoldMetrics>& folds, const FitnessWeights& fw) {
    if (folds.empty()) throw Error("cannot aggregate zero folds");
    EvalReport r;
    r.folds = folds;
    r.weights = fw;
    const auto mean = [&](auto member) {
        double s = 0;
        for (const auto& f : folds) s += f.*member;
        return s / static_cast<double>(folds.size());
    };
    r.precision = mean(&FoldMetrics::precision);
    r.recall = mean(&FoldMetrics::recall);
    r.pr_auc = mean(&FoldMetrics::pr_auc);
    r.spd = mean(&FoldMetrics::spd);
    r.eod = mean(&FoldMetrics::eod);
    r.di = mean(&FoldMetrics::di);
    const FitnessBreakdown b = fitness(r.pr_auc, r.spd, r.eod, r.di, fw);
    r.ps = b.ps;
    r.fs = b.fs;
    r.fitness = b.fitness;
    return r;
}

EvalReport EvalReport::disqualified(const std::string& reason, const FitnessWeights& fw) {
    EvalReport r;
    r.weights = fw;
    r.error = reason;
    r.fitness = -std::numeric_limits<double>::infinity();
    return r;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json fold_json = nlohmann::json::array();
    for (const auto& f : folds) fold_json.push_back(f.to_json());
    nlohmann::json j{{"precision", precision},
                     {"recall", recall},
                     {"pr_auc", pr_auc},
                     {"spd", spd},
                     {"eod", eod},
                     {"di", di},
                     {"ps", ps},
                     {"fs", fs},
                     {"fitness", fitness},
                     {"folds", fold_json},
                     {"weights", weights.to_json()}};
    if (!error.empty()) j["error"] = error;
    return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.pr_auc = j.at("pr_auc").get<double>();
    r.spd = j.at("spd").get<double>();
    r.eod = j.at("eod").get<double>();
    r.di = j.at("di").get<double>();
    r.ps = j.at("ps").get<double>();
    r.fs = j.at("fs").get<double>();
    // -inf serializes as null (disqualified evaluations).
    r.fitness = j.at("fitness").is_number() ? j.at("fitness").get<double>()
                                            : -std::numeric_limits<double>::infinity();
    for (const auto& f : j.at("folds")) r.folds.push_back(FoldMetrics::from_json(f));
    r.weights = FitnessWeights::from_json(j.at("weights"));
    if (j.contains("error")) r.error = j.at("error").get<std::string>();
    return r;
}

}  // namespace fate
