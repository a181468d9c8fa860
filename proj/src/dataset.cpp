#include "fate/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "fate/csv.hpp"
#include "fate/errors.hpp"
#include "fate/rng.hpp"

namespace fate {

namespace {

std::string kind_name(ColumnKind k) {
    return k == ColumnKind::Numeric ? "numeric" : "categorical";
}

ColumnKind kind_from_name(const std::string& s) {
    if (s == "numeric") return ColumnKind::Numeric;
    if (s == "categorical") return ColumnKind::Categorical;
    throw SchemaError("unknown column kind: " + s);
}

std::string policy_name(NaPolicy p) {
    return p == NaPolicy::DropRow ? "drop_row" : "impute_mode_mean";
}

NaPolicy policy_from_name(const std::string& s) {
    if (s == "drop_row") return NaPolicy::DropRow;
    if (s == "impute_mode_mean") return NaPolicy::ImputeModeMean;
    throw SchemaError("unknown na_policy: " + s);
}

// Unique output names for the target/protected columns of save_csv.
std::pair<std::string, std::string> output_label_names(const Dataset& ds) {
    std::unordered_set<std::string> taken(ds.feature_names.begin(), ds.feature_names.end());
    auto pick = [&taken](std::string name) {
        while (taken.count(name)) name += "_";
        taken.insert(name);
        return name;
    };
    return {pick("target"), pick("protected")};
}

}  // namespace

void DatasetSchema::validate() const {
    if (target_column.empty()) throw SchemaError("target_column is empty");
    if (protected_column.empty()) throw SchemaError("protected_column is empty");
    if (target_column == protected_column) {
        throw SchemaError("target_column and protected_column must be distinct");
    }
    std::unordered_set<std::string> seen;
    for (const auto& fc : feature_columns) {
        if (fc.name == target_column || fc.name == protected_column) {
            throw SchemaError("feature column '" + fc.name +
                              "' clashes with target/protected column");
        }
        if (!seen.insert(fc.name).second) {
            throw SchemaError("duplicate feature column: " + fc.name);
        }
    }
    if (feature_columns.empty()) throw SchemaError("schema lists no feature columns");
}

nlohmann::json DatasetSchema::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& fc : feature_columns) {
        cols.push_back({{"name", fc.name}, {"kind", kind_name(fc.kind)}});
    }
    return {{"target_column", target_column},
            {"favorable_label", favorable_label},
            {"protected_column", protected_column},
            {"privileged_value", privileged_value},
            {"feature_columns", cols},
            {"na_policy", policy_name(na_policy)}};
}

DatasetSchema DatasetSchema::from_json(const nlohmann::json& j) {
    DatasetSchema s;
    try {
        s.target_column = j.at("target_column").get<std::string>();
        s.favorable_label = j.at("favorable_label").get<std::string>();
        s.protected_column = j.at("protected_column").get<std::string>();
        s.privileged_value = j.at("privileged_value").get<std::string>();
        for (const auto& c : j.at("feature_columns")) {
            s.feature_columns.push_back(
                {c.at("name").get<std::string>(), kind_from_name(c.at("kind").get<std::string>())});
        }
        if (j.contains("na_policy")) {
            s.na_policy = policy_from_name(j.at("na_policy").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed schema JSON: ") + e.what());
    }
    s.validate();
    return s;
}

DatasetSchema DatasetSchema::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open schema file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("invalid schema JSON in ") + path + ": " + e.what());
    }
    return from_json(j);
}

void DatasetSchema::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write schema file: " + path);
    out << to_json().dump(2) << '\n';
}

void Dataset::validate() const {
    const std::size_t rows = n();
    if (rows == 0) throw EmptyDatasetError("dataset has no rows");
    if (y.size() != rows || a.size() != rows || w.size() != rows) {
        throw ShapeError("dataset row counts do not match");
    }
    if (feature_names.size() != d() || col_group.size() != d()) {
        throw ShapeError("dataset column metadata does not match feature count");
    }
    for (std::size_t i = 0; i < rows; ++i) {
        if (y[i] != 0 && y[i] != 1) throw Error("label out of {0,1}");
        if (a[i] != 0 && a[i] != 1) throw Error("protected indicator out of {0,1}");
        if (!(w[i] > 0.0)) throw Error("instance weight must be positive");
    }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.x = Matrix(rows.size(), d());
    out.y.reserve(rows.size());
    out.a.reserve(rows.size());
    out.w.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        std::copy_n(x.row(r), d(), out.x.row(i));
        out.y.push_back(y[r]);
        out.a.push_back(a[r]);
        out.w.push_back(w[r]);
    }
    out.feature_names = feature_names;
    out.col_group = col_group;
    return out;
}

std::array<std::vector<std::size_t>, 4> Dataset::cell_indices() const {
    std::array<std::vector<std::size_t>, 4> cells;
    for (std::size_t i = 0; i < n(); ++i) cells[y[i] * 2 + a[i]].push_back(i);
    return cells;
}

std::array<std::vector<std::size_t>, 2> Dataset::group_indices() const {
    std::array<std::vector<std::size_t>, 2> groups;
    for (std::size_t i = 0; i < n(); ++i) groups[a[i]].push_back(i);
    return groups;
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) rows.push_back(i);
    }
    return rows;
}

nlohmann::json FoldPlan::to_json() const {
    return {{"k", k}, {"assignments", assignments}};
}

Dataset load_csv(const std::string& path, const DatasetSchema& schema) {
    schema.validate();
    const csv::Table table = csv::read_file(path);

    const int target_idx = table.column(schema.target_column);
    if (target_idx < 0) throw SchemaError("missing column: " + schema.target_column);
    const int prot_idx = table.column(schema.protected_column);
    if (prot_idx < 0) throw SchemaError("missing column: " + schema.protected_column);
    std::vector<int> feat_idx;
    for (const auto& fc : schema.feature_columns) {
        const int idx = table.column(fc.name);
        if (idx < 0) throw SchemaError("missing column: " + fc.name);
        feat_idx.push_back(idx);
    }

    const bool impute = schema.na_policy == NaPolicy::ImputeModeMean;

    // Imputation statistics over the full file (documented leakage source;
    // only used when the schema opts in).
    std::vector<double> col_mean(feat_idx.size(), 0.0);
    std::vector<std::string> col_mode(feat_idx.size());
    if (impute) {
        for (std::size_t f = 0; f < feat_idx.size(); ++f) {
            if (schema.feature_columns[f].kind == ColumnKind::Numeric) {
                double sum = 0.0;
                std::size_t count = 0;
                for (const auto& row : table.rows) {
                    const std::string& v = row[feat_idx[f]];
                    if (csv::is_na(v)) continue;
                    sum += csv::parse_double(v);  // garbage -> ParseError
                    ++count;
                }
                col_mean[f] = count ? sum / static_cast<double>(count) : 0.0;
            } else {
                std::map<std::string, std::size_t> counts;
                for (const auto& row : table.rows) {
                    const std::string& v = row[feat_idx[f]];
                    if (!csv::is_na(v)) ++counts[v];
                }
                // Most frequent; ties resolved lexicographically by map order.
                std::size_t best = 0;
                for (const auto& [value, count] : counts) {
                    if (count > best) {
                        best = count;
                        col_mode[f] = value;
                    }
                }
            }
        }
    }

    // Decide which rows survive.
    std::vector<std::size_t> survivors;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (csv::is_na(row[target_idx]) || csv::is_na(row[prot_idx])) {
            if (impute) {
                throw ParseError("row " + std::to_string(r + 2) +
                                 ": target/protected value missing (labels are never imputed)");
            }
            continue;
        }
        bool ok = true;
        for (std::size_t f = 0; f < feat_idx.size() && ok; ++f) {
            const std::string& v = row[feat_idx[f]];
            if (csv::is_na(v)) {
                if (!impute) ok = false;  // drop_row
                continue;
            }
            if (schema.feature_columns[f].kind == ColumnKind::Numeric) {
                try {
                    csv::parse_double(v);
                } catch (const ParseError&) {
                    if (impute) {
                        throw ParseError("row " + std::to_string(r + 2) + ", column '" +
                                         schema.feature_columns[f].name + "': not a number: '" +
                                         v + "'");
                    }
                    ok = false;
                }
            }
        }
        if (ok) survivors.push_back(r);
    }
    if (survivors.empty()) throw EmptyDatasetError("no usable rows in " + path);

    // Category inventory over surviving rows, one-hot in lexicographic order.
    std::vector<std::vector<std::string>> categories(feat_idx.size());
    for (std::size_t f = 0; f < feat_idx.size(); ++f) {
        if (schema.feature_columns[f].kind != ColumnKind::Categorical) continue;
        std::set<std::string> values;
        for (std::size_t r : survivors) {
            const std::string& v = table.rows[r][feat_idx[f]];
            values.insert(csv::is_na(v) ? col_mode[f] : v);
        }
        categories[f].assign(values.begin(), values.end());
    }

    // Column layout: numeric features in schema order, then one-hot blocks in
    // schema order.
    Dataset ds;
    std::vector<std::size_t> numeric_feats, categorical_feats;
    for (std::size_t f = 0; f < feat_idx.size(); ++f) {
        if (schema.feature_columns[f].kind == ColumnKind::Numeric) {
            numeric_feats.push_back(f);
        } else {
            categorical_feats.push_back(f);
        }
    }
    for (std::size_t f : numeric_feats) {
        ds.feature_names.push_back(schema.feature_columns[f].name);
        ds.col_group.push_back(-1);
    }
    int group = 0;
    std::vector<std::size_t> cat_col_offset(feat_idx.size(), 0);
    std::size_t next_col = numeric_feats.size();
    for (std::size_t f : categorical_feats) {
        cat_col_offset[f] = next_col;
        for (const auto& cat : categories[f]) {
            ds.feature_names.push_back(schema.feature_columns[f].name + "=" + cat);
            ds.col_group.push_back(group);
        }
        next_col += categories[f].size();
        ++group;
    }

    ds.x = Matrix(survivors.size(), ds.feature_names.size());
    for (std::size_t out_r = 0; out_r < survivors.size(); ++out_r) {
        const auto& row = table.rows[survivors[out_r]];
        ds.y.push_back(row[target_idx] == schema.favorable_label ? 1 : 0);
        ds.a.push_back(row[prot_idx] == schema.privileged_value ? 1 : 0);
        ds.w.push_back(1.0);
        for (std::size_t i = 0; i < numeric_feats.size(); ++i) {
            const std::size_t f = numeric_feats[i];
            const std::string& v = row[feat_idx[f]];
            ds.x.at(out_r, i) = csv::is_na(v) ? col_mean[f] : csv::parse_double(v);
        }
        for (std::size_t f : categorical_feats) {
            const std::string& raw = row[feat_idx[f]];
            const std::string& v = csv::is_na(raw) ? col_mode[f] : raw;
            const auto it = std::lower_bound(categories[f].begin(), categories[f].end(), v);
            ds.x.at(out_r, cat_col_offset[f] +
                               static_cast<std::size_t>(it - categories[f].begin())) = 1.0;
        }
    }
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV file: " + path);
    const auto [target_name, prot_name] = output_label_names(ds);
    std::vector<std::string> fields = ds.feature_names;
    fields.push_back(target_name);
    fields.push_back(prot_name);
    csv::write_row(out, fields);
    for (std::size_t r = 0; r < ds.n(); ++r) {
        fields.clear();
        for (std::size_t c = 0; c < ds.d(); ++c) {
            fields.push_back(csv::format_double(ds.x.at(r, c)));
        }
        fields.push_back(ds.y[r] ? "1" : "0");
        fields.push_back(ds.a[r] ? "1" : "0");
        csv::write_row(out, fields);
    }
}

DatasetSchema induced_schema(const Dataset& ds) {
    const auto [target_name, prot_name] = output_label_names(ds);
    DatasetSchema s;
    s.target_column = target_name;
    s.favorable_label = "1";
    s.protected_column = prot_name;
    s.privileged_value = "1";
    for (const auto& name : ds.feature_names) {
        s.feature_columns.push_back({name, ColumnKind::Numeric});
    }
    s.na_policy = NaPolicy::DropRow;
    return s;
}

FoldPlan stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
    ds.validate();
    if (k < 2) throw InvalidFoldError("k must be at least 2");
    if (static_cast<std::size_t>(k) > ds.n()) {
        throw InvalidFoldError("k exceeds row count");
    }

    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(ds.n(), -1);

    // Deal each (y,a) stratum consecutively into folds, continuing the fold
    // counter across strata so overall fold sizes stay balanced too.
    const auto cells = ds.cell_indices();
    std::size_t counter = 0;
    for (std::size_t cell = 0; cell < cells.size(); ++cell) {
        std::vector<std::size_t> rows = cells[cell];
        Rng rng = make_rng(derive_seed(seed, 0x6b666f6cULL, cell));
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t r : rows) {
            plan.assignments[r] = static_cast<int>(counter % static_cast<std::size_t>(k));
            ++counter;
        }
    }
    return plan;
}

Dataset synthetic_biased(std::size_t n, double label_bias, std::uint64_t seed) {
    if (n < 20) throw Error("synthetic_biased requires n >= 20");
    if (label_bias < 0.0 || label_bias > 1.0) {
        throw Error("label_bias must lie in [0,1]");
    }

    const std::size_t n_priv = n / 2;
    const std::size_t n_unpriv = n - n_priv;
    const double p_priv = std::min(1.0, 0.5 + label_bias / 2.0);
    const double p_unpriv = std::max(0.0, 0.5 - label_bias / 2.0);
    const auto pos_priv = static_cast<std::size_t>(std::lround(p_priv * n_priv));
    const auto pos_unpriv = static_cast<std::size_t>(std::lround(p_unpriv * n_unpriv));

    std::vector<int> ys, as;
    ys.reserve(n);
    as.reserve(n);
    for (std::size_t i = 0; i < n_priv; ++i) {
        as.push_back(1);
        ys.push_back(i < pos_priv ? 1 : 0);
    }
    for (std::size_t i = 0; i < n_unpriv; ++i) {
        as.push_back(0);
        ys.push_back(i < pos_unpriv ? 1 : 0);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(derive_seed(seed, 0x73796e7468ULL));
    std::shuffle(order.begin(), order.end(), rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    Dataset ds;
    ds.x = Matrix(n, 2);
    ds.feature_names = {"f1", "f2"};
    ds.col_group = {-1, -1};
    for (std::size_t i = 0; i < n; ++i) {
        const int y = ys[order[i]];
        const int a = as[order[i]];
        ds.y.push_back(y);
        ds.a.push_back(a);
        ds.w.push_back(1.0);
        ds.x.at(i, 0) = 1.5 * y - 0.75 + noise(rng);
        ds.x.at(i, 1) = 1.0 * y + 0.6 * a - 0.8 + noise(rng);
    }
    ds.validate();
    return ds;
}

}  // namespace fate
