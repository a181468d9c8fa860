#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace fate {

inline constexpr double kDiCap = 10.0;

struct ConfusionCounts {
    double tp = 0, fp = 0, tn = 0, fn = 0;
    double total() const { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(const std::vector<int>& preds, const std::vector<int>& labels);

// Degenerate denominators map to 0 rather than erroring.
std::pair<double, double> precision_recall(const ConfusionCounts& c);

// Area under the precision-recall curve built at distinct descending score
// thresholds, starting from recall 0; tied scores share a threshold.
double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct GroupFairness {
    double spd = 0;  // P(Yhat=1|A=0) - P(Yhat=1|A=1)
    double eod = 0;  // TPR(A=0) - TPR(A=1)
    double di = 1;   // rate(A=0) / rate(A=1), capped at kDiCap
};

GroupFairness group_fairness(const std::vector<int>& preds, const std::vector<int>& labels,
                             const std::vector<int>& a);

enum class FsMode { Deviation, Literal };

std::string fs_mode_name(FsMode m);
FsMode fs_mode_from_name(const std::string& s);

struct FitnessWeights {
    double w_perf = 0.5;
    double w_fair = 0.5;
    FsMode fs_mode = FsMode::Deviation;

    void validate() const;
    nlohmann::json to_json() const;
    static FitnessWeights from_json(const nlohmann::json& j);
};

// Deviation mode: |spd| + |eod| + min(1, |1-di|). Literal mode keeps the
// printed |spd| + |eod| + |di| form.
double fairness_score(double spd, double eod, double di, FsMode mode);

// The scalar objective w_perf * ps - w_fair * fs.
double fitness_value(double ps, double fs, const FitnessWeights& fw);

struct FitnessBreakdown {
    double ps = 0;
    double fs = 0;
    double fitness = 0;
};

FitnessBreakdown fitness(double pr_auc_value, double spd, double eod, double di,
                         const FitnessWeights& fw);

struct FoldMetrics {
    double precision = 0, recall = 0, pr_auc = 0;
    double spd = 0, eod = 0, di = 1;
    double ps = 0, fs = 0, fitness = 0;

    nlohmann::json to_json() const;
    static FoldMetrics from_json(const nlohmann::json& j);
};

// One pipeline+model evaluation. Headline constituents are unweighted means
// over folds; ps/fs/fitness are recomputed from those means under the stored
// mode and weights. A nonempty error marks a disqualified evaluation
// (fitness -inf).
struct EvalReport {
    double precision = 0, recall = 0, pr_auc = 0;
    double spd = 0, eod = 0, di = 1;
    double ps = 0, fs = 0, fitness = 0;
    std::vector<FoldMetrics> folds;
    FitnessWeights weights;
    std::string error;

    bool ok() const { return error.empty(); }

    nlohmann::json to_json() const;
    static EvalReport from_json(const nlohmann::json& j);
    static EvalReport disqualified(const std::string& reason, const FitnessWeights& fw);
};

EvalReport aggregate_folds(const std::vector<FoldMetrics>& folds, const FitnessWeights& fw);

}  // namespace fate
