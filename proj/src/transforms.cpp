#include "fate/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "fate/csv.hpp"
#include "fate/errors.hpp"
#include "fate/kernels.hpp"
#include "fate/rng.hpp"

namespace fate {

namespace {

constexpr std::uint64_t kStepTag = 0x73746570ULL;  // "step"

bool is_row_altering(PracticeKind k) {
    switch (k) {
        case PracticeKind::ResampleOver:
        case PracticeKind::ResampleUnder:
        case PracticeKind::ResampleStratified:
        case PracticeKind::ClusterRebalance:
        case PracticeKind::Match:
            return true;
        default:
            return false;
    }
}

void require_all_cells(const Dataset& train, PracticeKind kind) {
    const auto cells = train.cell_indices();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].empty()) {
            throw DegenerateGroupError("practice " + practice_kind_name(kind) +
                                       " requires every (y,a) cell to be nonempty");
        }
    }
}

Dataset append_rows(const Dataset& base, const std::vector<std::size_t>& extra) {
    std::vector<std::size_t> rows(base.n());
    std::iota(rows.begin(), rows.end(), 0);
    rows.insert(rows.end(), extra.begin(), extra.end());
    return base.subset(rows);
}

// Standardized copy of the feature matrix for distance computations
// (clustering, matching). One-hot columns stay in {0,1}.
Matrix standardized_features(const Dataset& ds) {
    Dataset tmp = ds;
    apply_scaler(fit_scaler(PracticeKind::StandardScale, ds), tmp);
    return std::move(tmp.x);
}

Dataset resample_over(const Dataset& train, Rng& rng) {
    const auto cells = train.cell_indices();
    std::size_t target = 0;
    for (const auto& cell : cells) target = std::max(target, cell.size());

    std::vector<std::size_t> extra;
    for (const auto& cell : cells) {
        std::uniform_int_distribution<std::size_t> pick(0, cell.size() - 1);
        for (std::size_t i = cell.size(); i < target; ++i) extra.push_back(cell[pick(rng)]);
    }
    return append_rows(train, extra);
}

Dataset resample_under(const Dataset& train, Rng& rng) {
    const auto cells = train.cell_indices();
    std::size_t target = std::numeric_limits<std::size_t>::max();
    for (const auto& cell : cells) target = std::min(target, cell.size());

    std::vector<std::size_t> kept;
    for (const auto& cell : cells) {
        std::vector<std::size_t> shuffled = cell;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        kept.insert(kept.end(), shuffled.begin(), shuffled.begin() + target);
    }
    std::sort(kept.begin(), kept.end());
    return train.subset(kept);
}

Dataset resample_stratified(const Dataset& train, Rng& rng) {
    const auto cells = train.cell_indices();
    std::vector<std::size_t> counts;
    for (const auto& cell : cells) counts.push_back(cell.size());
    const auto targets = detail::apportion_largest_remainder(counts, train.n());

    std::vector<std::size_t> drawn;
    drawn.reserve(train.n());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (targets[c] == 0) continue;
        std::uniform_int_distribution<std::size_t> pick(0, cells[c].size() - 1);
        for (std::size_t i = 0; i < targets[c]; ++i) drawn.push_back(cells[c][pick(rng)]);
    }
    return train.subset(drawn);
}

Dataset cluster_rebalance(const Dataset& train, int k_clusters, Rng& rng) {
    const Matrix feats = standardized_features(train);
    const int k = std::min<int>(k_clusters, static_cast<int>(train.n()));
    std::uniform_int_distribution<std::uint64_t> seed_draw;
    const auto result = detail::kmeans(feats, k, /*iterations=*/50, seed_draw(rng));

    // Oversample the minority protected group within each cluster to parity.
    std::vector<std::size_t> extra;
    for (int c = 0; c < k; ++c) {
        std::array<std::vector<std::size_t>, 2> groups;
        for (std::size_t i = 0; i < train.n(); ++i) {
            if (result.assignment[i] == c) groups[train.a[i]].push_back(i);
        }
        if (groups[0].empty() || groups[1].empty()) continue;
        const int minority = groups[0].size() < groups[1].size() ? 0 : 1;
        const std::size_t deficit =
            std::max(groups[0].size(), groups[1].size()) - groups[minority].size();
        std::uniform_int_distribution<std::size_t> pick(0, groups[minority].size() - 1);
        for (std::size_t i = 0; i < deficit; ++i) extra.push_back(groups[minority][pick(rng)]);
    }
    return append_rows(train, extra);
}

Dataset ip_weight(const Dataset& train) {
    const auto groups = train.group_indices();
    if (groups[0].empty() || groups[1].empty()) {
        throw DegenerateGroupError("IPWeight requires both protected groups");
    }
    const double n = static_cast<double>(train.n());
    Dataset out = train;
    for (std::size_t i = 0; i < train.n(); ++i) {
        const double group_n = static_cast<double>(groups[train.a[i]].size());
        out.w[i] *= n / (2.0 * group_n);
    }
    return out;
}

Dataset match_rows(const Dataset& train, const std::optional<double>& max_distance) {
    const auto pairs = detail::greedy_match_pairs(train, max_distance);
    if (pairs.empty()) {
        throw DegenerateGroupError("matching produced no pairs");
    }
    std::vector<std::size_t> kept;
    for (const auto& [i, j] : pairs) {
        kept.push_back(i);
        kept.push_back(j);
    }
    std::sort(kept.begin(), kept.end());
    return train.subset(kept);
}

}  // namespace

std::string practice_kind_name(PracticeKind k) {
    switch (k) {
        case PracticeKind::StandardScale: return "standard_scale";
        case PracticeKind::MinMaxScale: return "minmax_scale";
        case PracticeKind::ResampleOver: return "resample_over";
        case PracticeKind::ResampleUnder: return "resample_under";
        case PracticeKind::ResampleStratified: return "resample_stratified";
        case PracticeKind::ClusterRebalance: return "cluster_rebalance";
        case PracticeKind::IPWeight: return "ip_weight";
        case PracticeKind::Match: return "match";
    }
    return "unknown";
}

PracticeKind practice_kind_from_name(const std::string& s) {
    if (s == "standard_scale") return PracticeKind::StandardScale;
    if (s == "minmax_scale") return PracticeKind::MinMaxScale;
    if (s == "resample_over") return PracticeKind::ResampleOver;
    if (s == "resample_under") return PracticeKind::ResampleUnder;
    if (s == "resample_stratified") return PracticeKind::ResampleStratified;
    if (s == "cluster_rebalance") return PracticeKind::ClusterRebalance;
    if (s == "ip_weight") return PracticeKind::IPWeight;
    if (s == "match") return PracticeKind::Match;
    throw ConfigError("unknown practice kind: " + s);
}

void Practice::validate() const {
    if (kind == PracticeKind::ClusterRebalance && k_clusters < 1) {
        throw ConfigError("cluster_rebalance needs k_clusters >= 1");
    }
    if (max_distance && *max_distance <= 0) {
        throw ConfigError("match max_distance must be positive");
    }
}

std::string Practice::name() const {
    std::string s = practice_kind_name(kind);
    if (kind == PracticeKind::ClusterRebalance) {
        s += "(k=" + std::to_string(k_clusters) + ")";
    } else if (kind == PracticeKind::Match && max_distance) {
        s += "(maxd=" + csv::format_double(*max_distance) + ")";
    }
    return s;
}

nlohmann::json Practice::to_json() const {
    nlohmann::json j{{"kind", practice_kind_name(kind)}};
    if (kind == PracticeKind::ClusterRebalance) {
        j["params"] = {{"k_clusters", k_clusters}};
    } else if (kind == PracticeKind::Match && max_distance) {
        j["params"] = {{"max_distance", *max_distance}};
    }
    return j;
}

Practice Practice::from_json(const nlohmann::json& j) {
    Practice p;
    p.kind = practice_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("params")) {
        const auto& params = j.at("params");
        if (params.contains("k_clusters")) p.k_clusters = params.at("k_clusters").get<int>();
        if (params.contains("max_distance")) {
            p.max_distance = params.at("max_distance").get<double>();
        }
    }
    p.validate();
    return p;
}

Practice Practice::from_name(const std::string& kind_name) {
    Practice p;
    p.kind = practice_kind_from_name(kind_name);
    return p;
}

void Pipeline::validate(std::size_t l_max) const {
    if (steps.empty()) throw ConfigError("pipeline must contain at least one practice");
    if (steps.size() > l_max) {
        throw ConfigError("pipeline exceeds maximum length " + std::to_string(l_max));
    }
    std::unordered_set<int> kinds;
    for (const auto& p : steps) {
        p.validate();
        if (!kinds.insert(static_cast<int>(p.kind)).second) {
            throw ConfigError("pipeline repeats practice kind " + practice_kind_name(p.kind));
        }
    }
}

std::string Pipeline::canonical() const {
    std::string s;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) s += "|";
        s += steps[i].name();
    }
    return s;
}

nlohmann::json Pipeline::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : steps) j.push_back(p.to_json());
    return j;
}

Pipeline Pipeline::from_json(const nlohmann::json& j) {
    Pipeline pl;
    for (const auto& step : j) pl.steps.push_back(Practice::from_json(step));
    pl.validate();
    return pl;
}

FittedTransform fit_scaler(PracticeKind kind, const Dataset& train) {
    const std::size_t d = train.d();
    FittedTransform t;
    t.kind = kind;
    t.applies.assign(d, false);
    t.shift.assign(d, 0.0);
    t.scale.assign(d, 1.0);

    const double n = static_cast<double>(train.n());
    for (std::size_t j = 0; j < d; ++j) {
        if (train.col_group[j] >= 0) continue;  // one-hot columns pass through
        t.applies[j] = true;
        if (kind == PracticeKind::StandardScale) {
            double mean = 0;
            for (std::size_t i = 0; i < train.n(); ++i) mean += train.x.at(i, j);
            mean /= n;
            double var = 0;
            for (std::size_t i = 0; i < train.n(); ++i) {
                const double dlt = train.x.at(i, j) - mean;
                var += dlt * dlt;
            }
            t.shift[j] = mean;
            t.scale[j] = std::sqrt(var / n);  // population std
        } else {
            double lo = train.x.at(0, j), hi = train.x.at(0, j);
            for (std::size_t i = 1; i < train.n(); ++i) {
                lo = std::min(lo, train.x.at(i, j));
                hi = std::max(hi, train.x.at(i, j));
            }
            t.shift[j] = lo;
            t.scale[j] = hi - lo;
        }
    }
    return t;
}

void apply_scaler(const FittedTransform& t, Dataset& ds) {
    if (t.applies.size() != ds.d()) throw ShapeError("scaler dimension mismatch");
    for (std::size_t j = 0; j < ds.d(); ++j) {
        if (!t.applies[j]) continue;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            double& v = ds.x.at(i, j);
            v = t.scale[j] == 0.0 ? 0.0 : (v - t.shift[j]) / t.scale[j];
        }
    }
}

std::pair<Dataset, Dataset> fit_apply(const Practice& p, const Dataset& train,
                                      const Dataset& test, std::uint64_t seed) {
    p.validate();
    train.validate();
    test.validate();
    if (train.d() != test.d()) throw ShapeError("train/test feature counts differ");
    if (is_row_altering(p.kind)) require_all_cells(train, p.kind);

    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(p.kind)));
    switch (p.kind) {
        case PracticeKind::StandardScale:
        case PracticeKind::MinMaxScale: {
            const FittedTransform t = fit_scaler(p.kind, train);
            Dataset train_out = train;
            Dataset test_out = test;
            apply_scaler(t, train_out);
            apply_scaler(t, test_out);
            return {std::move(train_out), std::move(test_out)};
        }
        case PracticeKind::ResampleOver:
            return {resample_over(train, rng), test};
        case PracticeKind::ResampleUnder:
            return {resample_under(train, rng), test};
        case PracticeKind::ResampleStratified:
            return {resample_stratified(train, rng), test};
        case PracticeKind::ClusterRebalance:
            return {cluster_rebalance(train, p.k_clusters, rng), test};
        case PracticeKind::IPWeight:
            return {ip_weight(train), test};
        case PracticeKind::Match:
            return {match_rows(train, p.max_distance), test};
    }
    throw ConfigError("unhandled practice kind");
}

std::pair<Dataset, Dataset> apply_pipeline(const Pipeline& pl, const Dataset& train,
                                           const Dataset& test, std::uint64_t seed) {
    pl.validate();
    Dataset cur_train = train;
    Dataset cur_test = test;
    for (std::size_t s = 0; s < pl.steps.size(); ++s) {
        try {
            auto [next_train, next_test] =
                fit_apply(pl.steps[s], cur_train, cur_test,
                          derive_seed(seed, kStepTag, static_cast<std::uint64_t>(s)));
            cur_train = std::move(next_train);
            cur_test = std::move(next_test);
        } catch (const Error& e) {
            throw PipelineStepError(static_cast<int>(s), e.what());
        }
    }
    return {std::move(cur_train), std::move(cur_test)};
}

namespace detail {

std::vector<std::size_t> apportion_largest_remainder(const std::vector<std::size_t>& counts,
                                                     std::size_t total) {
    const double sum = static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                                           std::size_t{0}));
    if (sum == 0) throw Error("cannot apportion over zero counts");

    std::vector<std::size_t> out(counts.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;  // (-remainder, index)
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double quota = static_cast<double>(total) * static_cast<double>(counts[i]) / sum;
        out[i] = static_cast<std::size_t>(std::floor(quota));
        assigned += out[i];
        remainders.emplace_back(-(quota - std::floor(quota)), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) {
        ++out[remainders[r % remainders.size()].second];
    }
    return out;
}

KMeansResult kmeans(const Matrix& points, int k, int iterations, std::uint64_t seed) {
    if (k < 1) throw ConfigError("kmeans needs k >= 1");
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    Rng rng = make_rng(derive_seed(seed, 0x6b6d65616e73ULL));

    // k-means++ seeding.
    KMeansResult res;
    res.centroids = Matrix(k, d);
    std::vector<double> min_dist(n, std::numeric_limits<double>::max());
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::copy_n(points.row(first(rng)), d, res.centroids.row(0));
    for (int c = 1; c < k; ++c) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist =
                kernels::squared_distance(points.row(i), res.centroids.row(c - 1), d);
            min_dist[i] = std::min(min_dist[i], dist);
            total += min_dist[i];
        }
        std::size_t chosen = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            for (std::size_t i = 0; i < n; ++i) {
                target -= min_dist[i];
                if (target <= 0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = first(rng);
        }
        std::copy_n(points.row(chosen), d, res.centroids.row(c));
    }

    res.assignment.assign(n, 0);
    std::vector<double> sums(static_cast<std::size_t>(k) * d);
    std::vector<std::size_t> sizes(k);
    for (int it = 0; it < iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_dist = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                const double dist =
                    kernels::squared_distance(points.row(i), res.centroids.row(c), d);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = c;
                }
            }
            if (res.assignment[i] != best) {
                res.assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && it > 0) break;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = res.assignment[i];
            kernels::axpy(1.0, points.row(i), sums.data() + static_cast<std::size_t>(c) * d, d);
            ++sizes[c];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;  // keep the stale centroid
            for (std::size_t j = 0; j < d; ++j) {
                res.centroids.at(c, j) =
                    sums[static_cast<std::size_t>(c) * d + j] / static_cast<double>(sizes[c]);
            }
        }
    }
    return res;
}

std::vector<std::pair<std::size_t, std::size_t>> greedy_match_pairs(
    const Dataset& train, std::optional<double> max_distance) {
    const Matrix feats = standardized_features(train);
    const auto groups = train.group_indices();
    if (groups[0].empty() || groups[1].empty()) {
        throw DegenerateGroupError("matching requires both protected groups");
    }

    struct Candidate {
        double dist2;
        std::size_t i, j;  // i in group 0, j in group 1
    };
    std::vector<Candidate> candidates;
    candidates.reserve(groups[0].size() * groups[1].size());
    const double cap2 =
        max_distance ? (*max_distance) * (*max_distance) : std::numeric_limits<double>::max();
    for (std::size_t i : groups[0]) {
        for (std::size_t j : groups[1]) {
            const double dist2 =
                kernels::squared_distance(feats.row(i), feats.row(j), feats.cols);
            if (dist2 <= cap2) candidates.push_back({dist2, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    std::vector<char> used(train.n(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& c : candidates) {
        if (used[c.i] || used[c.j]) continue;
        used[c.i] = used[c.j] = 1;
        pairs.emplace_back(c.i, c.j);
    }
    return pairs;
}

}  // namespace detail

}  // namespace fate
