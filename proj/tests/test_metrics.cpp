#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "fate/errors.hpp"
#include "fate/metrics.hpp"
#include "fate/rng.hpp"

using namespace fate;

namespace {

// Independent PR-AUC oracle: recompute confusion counts from scratch at every
// distinct threshold and integrate rectangles from recall 0.
double pr_auc_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::set<double, std::greater<double>> thresholds(scores.begin(), scores.end());
    double positives = 0;
    for (int y : labels) positives += y;

    double auc = 0.0, prev_recall = 0.0;
    for (double t : thresholds) {
        double tp = 0, fp = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                labels[i] ? ++tp : ++fp;
            }
        }
        const double precision = tp / (tp + fp);
        const double recall = tp / positives;
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return auc;
}

struct GroupRates {
    double spd, eod, di;
};

// Direct counting oracle for the group fairness metrics.
GroupRates fairness_oracle(const std::vector<int>& preds, const std::vector<int>& labels,
                           const std::vector<int>& a) {
    double fav[2] = {0, 0}, n[2] = {0, 0}, tp[2] = {0, 0}, pos[2] = {0, 0};
    for (std::size_t i = 0; i < preds.size(); ++i) {
        n[a[i]] += 1;
        fav[a[i]] += preds[i];
        if (labels[i] == 1) {
            pos[a[i]] += 1;
            tp[a[i]] += preds[i];
        }
    }
    const double r0 = fav[0] / n[0], r1 = fav[1] / n[1];
    GroupRates g;
    g.spd = r0 - r1;
    g.eod = tp[0] / pos[0] - tp[1] / pos[1];
    g.di = r1 == 0 ? (r0 == 0 ? 1.0 : kDiCap) : std::min(r0 / r1, kDiCap);
    return g;
}

}  // namespace

TEST_CASE("precision_recall handles the stated cases") {
    CHECK(precision_recall({3, 1, 0, 1}).first == doctest::Approx(0.75));
    CHECK(precision_recall({3, 1, 0, 1}).second == doctest::Approx(0.75));
    CHECK(precision_recall({0, 0, 0, 5}) == std::pair<double, double>{0.0, 0.0});
    CHECK(precision_recall({5, 0, 0, 0}) == std::pair<double, double>{1.0, 1.0});
}

TEST_CASE("pr_auc matches the hand-computed four-point example") {
    const double auc = pr_auc({0.9, 0.8, 0.7, 0.6}, {1, 1, 0, 1});
    CHECK(auc == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
    CHECK(auc == doctest::Approx(0.9167).epsilon(1e-4));
}

TEST_CASE("pr_auc degenerate cases") {
    // Perfect ranking.
    CHECK(pr_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
    // All labels positive.
    CHECK(pr_auc({0.4, 0.9, 0.1}, {1, 1, 1}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pr_auc({0.5, 0.6}, {0, 0}), UndefinedMetricError);
}

TEST_CASE("pr_auc equals the brute-force oracle on random instances") {
    Rng rng = make_rng(42);
    std::uniform_int_distribution<std::size_t> size_draw(2, 64);
    std::uniform_real_distribution<double> score_draw(0.0, 1.0);
    std::uniform_int_distribution<int> quantize(1, 8);
    std::bernoulli_distribution label_draw(0.4);

    int checked = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = size_draw(rng);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool any_pos = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Quantized scores force plenty of ties.
            scores[i] = rep % 2 ? score_draw(rng)
                                : static_cast<double>(quantize(rng)) / 8.0;
            labels[i] = label_draw(rng) ? 1 : 0;
            any_pos |= labels[i] == 1;
        }
        if (!any_pos) labels[0] = 1;
        CHECK(pr_auc(scores, labels) ==
              doctest::Approx(pr_auc_oracle(scores, labels)).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("group_fairness matches the worked example") {
    // A=0: 1 favorable of 4; A=1: 3 favorable of 6.
    std::vector<int> preds{1, 0, 0, 0, 1, 1, 1, 0, 0, 0};
    std::vector<int> labels{1, 1, 0, 0, 1, 1, 1, 0, 0, 0};
    std::vector<int> a{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    const GroupFairness g = group_fairness(preds, labels, a);
    CHECK(g.spd == doctest::Approx(-0.25));
    CHECK(g.di == doctest::Approx(0.5));
}

TEST_CASE("group_fairness eod from per-group TPRs") {
    // TPR(A=0)=1.0, TPR(A=1)=0.5.
    std::vector<int> preds{1, 1, 1, 0};
    std::vector<int> labels{1, 1, 1, 1};
    std::vector<int> a{0, 0, 1, 1};
    CHECK(group_fairness(preds, labels, a).eod == doctest::Approx(0.5));
}

TEST_CASE("identical group behavior gives (0, 0, 1)") {
    std::vector<int> preds{1, 0, 1, 0};
    std::vector<int> labels{1, 1, 1, 1};
    std::vector<int> a{0, 0, 1, 1};
    const GroupFairness g = group_fairness(preds, labels, a);
    CHECK(g.spd == 0.0);
    CHECK(g.eod == 0.0);
    CHECK(g.di == 1.0);
}

TEST_CASE("single-group input raises DegenerateGroupError") {
    CHECK_THROWS_AS(group_fairness({1, 0}, {1, 1}, {0, 0}), DegenerateGroupError);
}

TEST_CASE("group metrics match the counting oracle and swap symmetry") {
    Rng rng = make_rng(7);
    std::bernoulli_distribution coin(0.5);
    int accepted = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::uniform_int_distribution<std::size_t> size_draw(4, 64);
        const std::size_t n = size_draw(rng);
        std::vector<int> preds(n), labels(n), a(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = coin(rng);
            labels[i] = coin(rng);
            a[i] = coin(rng);
        }
        // Ensure both groups and positives in both groups.
        labels[0] = labels[1] = 1;
        a[0] = 0;
        a[1] = 1;

        const GroupFairness g = group_fairness(preds, labels, a);
        const GroupRates oracle = fairness_oracle(preds, labels, a);
        CHECK(g.spd == doctest::Approx(oracle.spd).epsilon(1e-9));
        CHECK(g.eod == doctest::Approx(oracle.eod).epsilon(1e-9));
        CHECK(g.di == doctest::Approx(oracle.di).epsilon(1e-9));
        CHECK(g.spd >= -1.0);
        CHECK(g.spd <= 1.0);
        CHECK(g.eod >= -1.0);
        CHECK(g.eod <= 1.0);
        CHECK(g.di >= 0.0);
        CHECK(g.di <= kDiCap);

        // Swapping the group encoding negates spd/eod and inverts di.
        std::vector<int> flipped(n);
        for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - a[i];
        const GroupFairness h = group_fairness(preds, labels, flipped);
        CHECK(h.spd == doctest::Approx(-g.spd).epsilon(1e-9));
        CHECK(h.eod == doctest::Approx(-g.eod).epsilon(1e-9));
        if (g.di > 0 && g.di < kDiCap && h.di < kDiCap) {
            CHECK(h.di == doctest::Approx(1.0 / g.di).epsilon(1e-9));
        }
        ++accepted;
    }
    CHECK(accepted == 1000);
}

TEST_CASE("fitness golden values from the running example") {
    FitnessWeights fw;
    const FitnessBreakdown a = fitness(0.88, 0.0, 0.0, 1.0, fw);
    // fs assembled directly: the example states fs, not its constituents.
    CHECK(0.5 * 0.88 - 0.5 * 0.10 == 0.39);
    CHECK(0.5 * 0.90 - 0.5 * 0.45 == 0.225);
    CHECK(a.fitness == doctest::Approx(0.44));

    // Deviation-mode fixed point: unbiased predictions have fs = 0.
    CHECK(fairness_score(0, 0, 1, FsMode::Deviation) == 0.0);
    CHECK(fairness_score(0, 0, 1, FsMode::Literal) == 1.0);
}

TEST_CASE("fitness is monotone in ps and fs") {
    FitnessWeights fw;
    Rng rng = make_rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double ps = u(rng), spd = u(rng) - 0.5, eod = u(rng) - 0.5, di = 2 * u(rng);
        const double base = fitness(ps, spd, eod, di, fw).fitness;
        CHECK(fitness(ps + 0.01, spd, eod, di, fw).fitness > base);
        const double worse_fs =
            fitness(ps, spd + (spd >= 0 ? 0.01 : -0.01), eod, di, fw).fitness;
        CHECK(worse_fs < base);
    }
}

TEST_CASE("fold aggregation stores per-fold values and recomputable means") {
    FitnessWeights fw;
    std::vector<FoldMetrics> folds;
    for (int f = 0; f < 3; ++f) {
        FoldMetrics m;
        m.precision = 0.5 + 0.1 * f;
        m.recall = 0.4 + 0.1 * f;
        m.pr_auc = 0.6 + 0.1 * f;
        m.spd = -0.1 * f;
        m.eod = 0.05 * f;
        m.di = 0.9 + 0.05 * f;
        const FitnessBreakdown b = fitness(m.pr_auc, m.spd, m.eod, m.di, fw);
        m.ps = b.ps;
        m.fs = b.fs;
        m.fitness = b.fitness;
        folds.push_back(m);
    }
    const EvalReport r = aggregate_folds(folds, fw);
    CHECK(r.folds.size() == 3);
    CHECK(r.pr_auc == doctest::Approx(0.7));
    CHECK(r.ps == r.pr_auc);
    double mean_spd = (0.0 - 0.1 - 0.2) / 3.0;
    CHECK(r.spd == doctest::Approx(mean_spd));
    CHECK(r.fs ==
          doctest::Approx(fairness_score(r.spd, r.eod, r.di, fw.fs_mode)).epsilon(1e-12));
    CHECK(r.fitness == doctest::Approx(0.5 * r.ps - 0.5 * r.fs).epsilon(1e-12));

    // Mean is re-checkable from the stored breakdown.
    double check = 0;
    for (const auto& f : r.folds) check += f.pr_auc;
    CHECK(r.pr_auc == doctest::Approx(check / 3.0));
}

TEST_CASE("EvalReport JSON round-trip, including disqualified reports") {
    FitnessWeights fw;
    fw.fs_mode = FsMode::Literal;
    EvalReport r = EvalReport::disqualified("fold 2: boom", fw);
    const EvalReport back = EvalReport::from_json(r.to_json());
    CHECK_FALSE(back.ok());
    CHECK(back.error == "fold 2: boom");
    CHECK(std::isinf(back.fitness));
    CHECK(back.weights.fs_mode == FsMode::Literal);
}

TEST_CASE("weights must not both be zero") {
    FitnessWeights fw;
    fw.w_perf = 0;
    fw.w_fair = 0;
    CHECK_THROWS_AS(fw.validate(), ConfigError);
}
