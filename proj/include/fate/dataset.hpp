#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "fate/matrix.hpp"

namespace fate {

enum class ColumnKind { Numeric, Categorical };
enum class NaPolicy { DropRow, ImputeModeMean };

struct FeatureColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
};

// Binds the raw CSV columns to the learning problem: which column is the
// target (and which raw value counts as the favorable outcome Y=1), which is
// the protected attribute (and which raw value is privileged, A=1), and how
// the remaining columns are encoded.
struct DatasetSchema {
    std::string target_column;
    std::string favorable_label;
    std::string protected_column;
    std::string privileged_value;
    std::vector<FeatureColumn> feature_columns;
    NaPolicy na_policy = NaPolicy::DropRow;

    void validate() const;  // throws SchemaError

    nlohmann::json to_json() const;
    static DatasetSchema from_json(const nlohmann::json& j);
    static DatasetSchema load(const std::string& path);
    void save(const std::string& path) const;
};

// Encoded tabular data. Categorical inputs are one-hot expanded, so x is
// fully numeric; col_group marks which columns belong to which one-hot block
// (-1 for plain numeric columns).
struct Dataset {
    Matrix x;
    std::vector<int> y;  // {0,1}, 1 = favorable
    std::vector<int> a;  // {0,1}, 1 = privileged
    std::vector<double> w;
    std::vector<std::string> feature_names;
    std::vector<int> col_group;

    std::size_t n() const { return x.rows; }
    std::size_t d() const { return x.cols; }

    void validate() const;  // throws on invariant violation

    Dataset subset(const std::vector<std::size_t>& rows) const;

    // Row indices per (y,a) cell; cell index = y*2 + a.
    std::array<std::vector<std::size_t>, 4> cell_indices() const;
    // Row indices per protected group.
    std::array<std::vector<std::size_t>, 2> group_indices() const;
};

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;

    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;

    nlohmann::json to_json() const;
};

Dataset load_csv(const std::string& path, const DatasetSchema& schema);

// Writes the encoded dataset back out (features, then target and protected
// columns as 0/1). Reloading with induced_schema() reproduces x, y, a exactly.
void save_csv(const Dataset& ds, const std::string& path);
DatasetSchema induced_schema(const Dataset& ds);

FoldPlan stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

// Test-fixture generator: two informative numeric features and labels whose
// base rate differs between protected groups by label_bias (SPD of the labels
// is -label_bias up to rounding).
Dataset synthetic_biased(std::size_t n, double label_bias, std::uint64_t seed);

}  // namespace fate
