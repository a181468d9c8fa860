#include "fate/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fate/errors.hpp"
#include "fate/kernels.hpp"
#include "fate/rng.hpp"

namespace fate {

Dataset reweighing(const Dataset& train) {
    train.validate();
    const auto cells = train.cell_indices();
    for (const auto& cell : cells) {
        if (cell.empty()) {
            throw DegenerateGroupError("reweighing requires every (a,y) cell to be nonempty");
        }
    }
    const double n = static_cast<double>(train.n());
    std::array<double, 2> n_a{}, n_y{};
    for (std::size_t i = 0; i < train.n(); ++i) {
        n_a[train.a[i]] += 1.0;
        n_y[train.y[i]] += 1.0;
    }
    Dataset out = train;
    for (std::size_t i = 0; i < train.n(); ++i) {
        const double cell_count =
            static_cast<double>(cells[train.y[i] * 2 + train.a[i]].size());
        out.w[i] = n_a[train.a[i]] * n_y[train.y[i]] / (n * cell_count);
    }
    return out;
}

Dataset fair_smote(const Dataset& train, const SmoteParams& p) {
    train.validate();
    if (p.k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
    const auto cells = train.cell_indices();
    std::size_t target = 0;
    for (const auto& cell : cells) {
        if (cell.size() < 2) {
            throw DegenerateGroupError("fair_smote requires every (a,y) cell to have >= 2 rows");
        }
        target = std::max(target, cell.size());
    }

    // One-hot group -> member columns, for copying whole indicator blocks.
    std::map<int, std::vector<std::size_t>> onehot_groups;
    std::vector<std::size_t> numeric_cols;
    for (std::size_t j = 0; j < train.d(); ++j) {
        if (train.col_group[j] >= 0) {
            onehot_groups[train.col_group[j]].push_back(j);
        } else {
            numeric_cols.push_back(j);
        }
    }

    Rng rng = make_rng(derive_seed(p.seed, 0x736d6f7465ULL));
    std::vector<std::vector<double>> synthetic_rows;
    std::vector<int> synthetic_y, synthetic_a;

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        const std::size_t k =
            std::min<std::size_t>(static_cast<std::size_t>(p.k_neighbors), cell.size() - 1);
        std::uniform_int_distribution<std::size_t> base_pick(0, cell.size() - 1);
        std::uniform_int_distribution<std::size_t> nb_pick(0, k - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        for (std::size_t s = cell.size(); s < target; ++s) {
            const std::size_t base = cell[base_pick(rng)];

            // k nearest same-cell neighbors by Euclidean distance, exact scan.
            std::vector<std::pair<double, std::size_t>> dists;
            dists.reserve(cell.size() - 1);
            for (std::size_t other : cell) {
                if (other == base) continue;
                dists.emplace_back(
                    kernels::squared_distance(train.x.row(base), train.x.row(other), train.d()),
                    other);
            }
            std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
            const std::size_t neighbor = dists[nb_pick(rng)].second;

            const double u = unit(rng);
            std::vector<double> row(train.d());
            for (std::size_t j : numeric_cols) {
                const double xb = train.x.at(base, j);
                row[j] = xb + u * (train.x.at(neighbor, j) - xb);
            }
            for (const auto& [group, columns] : onehot_groups) {
                const std::size_t source = unit(rng) < 0.5 ? base : neighbor;
                for (std::size_t j : columns) row[j] = train.x.at(source, j);
            }
            synthetic_rows.push_back(std::move(row));
            synthetic_y.push_back(train.y[cell.front()]);
            synthetic_a.push_back(train.a[cell.front()]);
        }
    }

    Dataset out = train;
    const std::size_t n_new = train.n() + synthetic_rows.size();
    Matrix x(n_new, train.d());
    std::copy(train.x.data.begin(), train.x.data.end(), x.data.begin());
    for (std::size_t s = 0; s < synthetic_rows.size(); ++s) {
        std::copy(synthetic_rows[s].begin(), synthetic_rows[s].end(), x.row(train.n() + s));
        out.y.push_back(synthetic_y[s]);
        out.a.push_back(synthetic_a[s]);
        out.w.push_back(1.0);
    }
    out.x = std::move(x);
    out.validate();
    return out;
}

namespace {

// Per-group sorted train values and the blended target quantile function for
// one feature.
struct QuantileRepair {
    std::array<std::vector<double>, 2> sorted;

    double group_quantile(int g, double q) const {
        const auto& values = sorted[g];
        const auto idx = static_cast<std::size_t>(std::clamp(
            std::floor(q * static_cast<double>(values.size())), 0.0,
            static_cast<double>(values.size() - 1)));
        return values[idx];
    }

    // Per-rank median across the two groups; with two groups the median is
    // their midpoint.
    double target(double q) const {
        return 0.5 * (group_quantile(0, q) + group_quantile(1, q));
    }

    // Nearest-rank position of a value within its group's train distribution.
    double rank_quantile(int g, double v) const {
        const auto& values = sorted[g];
        const auto below = static_cast<std::size_t>(
            std::lower_bound(values.begin(), values.end(), v) - values.begin());
        const std::size_t rank = std::min(below, values.size() - 1);
        return (static_cast<double>(rank) + 0.5) / static_cast<double>(values.size());
    }
};

}  // namespace

std::pair<Dataset, Dataset> disparate_impact_remover(const Dataset& train, const Dataset& test,
                                                     RepairLevel r) {
    train.validate();
    test.validate();
    if (train.d() != test.d()) throw ShapeError("train/test feature counts differ");
    if (r.lambda < 0.0 || r.lambda > 1.0) throw ConfigError("repair level must lie in [0,1]");

    const auto groups = train.group_indices();
    if (groups[0].empty() || groups[1].empty()) {
        throw DegenerateGroupError("disparate impact remover requires both groups in train");
    }

    Dataset train_out = train;
    Dataset test_out = test;
    if (r.lambda == 0.0) return {std::move(train_out), std::move(test_out)};

    for (std::size_t j = 0; j < train.d(); ++j) {
        if (train.col_group[j] >= 0) continue;  // one-hot columns untouched

        QuantileRepair repair;
        for (int g = 0; g < 2; ++g) {
            repair.sorted[g].reserve(groups[g].size());
            for (std::size_t i : groups[g]) repair.sorted[g].push_back(train.x.at(i, j));
            std::sort(repair.sorted[g].begin(), repair.sorted[g].end());
        }

        // Train rows get their exact within-group rank (stable in row order
        // for ties); test rows use nearest-rank lookup against train.
        for (int g = 0; g < 2; ++g) {
            const auto& rows = groups[g];
            std::vector<std::size_t> order(rows.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return train.x.at(rows[a], j) < train.x.at(rows[b], j);
            });
            const double group_n = static_cast<double>(rows.size());
            for (std::size_t rank = 0; rank < order.size(); ++rank) {
                const std::size_t i = rows[order[rank]];
                const double q = (static_cast<double>(rank) + 0.5) / group_n;
                train_out.x.at(i, j) =
                    (1.0 - r.lambda) * train.x.at(i, j) + r.lambda * repair.target(q);
            }
        }
        for (std::size_t i = 0; i < test.n(); ++i) {
            const double v = test.x.at(i, j);
            const double q = repair.rank_quantile(test.a[i], v);
            test_out.x.at(i, j) = (1.0 - r.lambda) * v + r.lambda * repair.target(q);
        }
    }
    return {std::move(train_out), std::move(test_out)};
}

}  // namespace fate
