#pragma once

#include <cstdint>
#include <utility>

#include "fate/dataset.hpp"

namespace fate {

// Kamiran-Calders reweighing: assigns w(a,y) = n_a*n_y / (n*n_{a,y}) so the
// protected attribute and label are independent under the weights. Features
// and labels are untouched.
Dataset reweighing(const Dataset& train);

struct SmoteParams {
    int k_neighbors = 5;
    std::uint64_t seed = 0;
};

// Subgroup-balancing SMOTE: every (a,y) cell is raised to the maximum cell
// count with synthetic rows interpolated between a cell member and one of its
// k nearest same-cell neighbors. Original rows are preserved unchanged.
Dataset fair_smote(const Dataset& train, const SmoteParams& p);

struct RepairLevel {
    double lambda = 1.0;  // 0 = identity, 1 = full repair
};

// Feldman et al. quantile repair: per numeric feature, move each group's
// distribution toward the per-rank median distribution, preserving
// within-group rank order. Test rows are repaired with train-fitted maps.
std::pair<Dataset, Dataset> disparate_impact_remover(const Dataset& train, const Dataset& test,
                                                     RepairLevel r);

}  // namespace fate
