#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fate/dataset.hpp"

namespace fate {

enum class PracticeKind {
    StandardScale,
    MinMaxScale,
    ResampleOver,
    ResampleUnder,
    ResampleStratified,
    ClusterRebalance,
    IPWeight,
    Match,
};

std::string practice_kind_name(PracticeKind k);
PracticeKind practice_kind_from_name(const std::string& s);

struct Practice {
    PracticeKind kind = PracticeKind::StandardScale;
    int k_clusters = 5;                       // ClusterRebalance
    std::optional<double> max_distance;       // Match

    void validate() const;
    std::string name() const;  // includes non-default params, e.g. cluster_rebalance(k=5)

    nlohmann::json to_json() const;
    static Practice from_json(const nlohmann::json& j);
    static Practice from_name(const std::string& kind_name);
};

// The GA chromosome: an ordered sequence of practices with pairwise distinct
// kinds, applied left to right.
struct Pipeline {
    std::vector<Practice> steps;

    void validate(std::size_t l_max = 64) const;
    std::string canonical() const;  // stable serialization, used for identity

    nlohmann::json to_json() const;
    static Pipeline from_json(const nlohmann::json& j);
};

// Train-fitted state of a feature-transforming practice. Row-altering
// practices never touch the test fold, so nothing is fitted for them.
struct FittedTransform {
    PracticeKind kind;
    std::vector<bool> applies;        // per column; one-hot columns pass through
    std::vector<double> shift, scale; // x' = (x - shift) / scale; scale 0 maps to 0
};

FittedTransform fit_scaler(PracticeKind kind, const Dataset& train);
void apply_scaler(const FittedTransform& t, Dataset& ds);

// Applies one practice with strict fit-on-train semantics: scalers transform
// the features of both folds using train statistics, row-altering practices
// and IPWeight touch only the train fold.
std::pair<Dataset, Dataset> fit_apply(const Practice& p, const Dataset& train,
                                      const Dataset& test, std::uint64_t seed);

std::pair<Dataset, Dataset> apply_pipeline(const Pipeline& pl, const Dataset& train,
                                           const Dataset& test, std::uint64_t seed);

namespace detail {

struct KMeansResult {
    Matrix centroids;
    std::vector<int> assignment;
};

KMeansResult kmeans(const Matrix& points, int k, int iterations, std::uint64_t seed);

std::vector<std::pair<std::size_t, std::size_t>> greedy_match_pairs(
    const Dataset& train, std::optional<double> max_distance);

// Largest-remainder apportionment of `total` by `counts` proportions.
std::vector<std::size_t> apportion_largest_remainder(const std::vector<std::size_t>& counts,
                                                     std::size_t total);

}  // namespace detail

}  // namespace fate
