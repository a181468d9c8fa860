#include <algorithm>
#include <set>

#include "doctest.h"

#include "fate/csv.hpp"
#include "fate/dataset.hpp"
#include "fate/errors.hpp"
#include "helpers.hpp"

using namespace fate;
using test::TempDir;
using test::write_file;

namespace {

DatasetSchema demo_schema() {
    DatasetSchema s;
    s.target_column = "class";
    s.favorable_label = "good";
    s.protected_column = "sex";
    s.privileged_value = "male";
    s.feature_columns = {{"age", ColumnKind::Numeric}, {"color", ColumnKind::Categorical}};
    return s;
}

double label_spd(const Dataset& ds) {
    double n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.a[i] == 0) {
            ++n0;
            pos0 += ds.y[i];
        } else {
            ++n1;
            pos1 += ds.y[i];
        }
    }
    return pos0 / n0 - pos1 / n1;
}

}  // namespace

TEST_CASE("load_csv maps labels, protected attribute and one-hot features") {
    TempDir dir("load");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\n"
               "30,red,male,good\n"
               "40,blue,female,bad\n"
               "50,red,female,good\n");
    const Dataset ds = load_csv(dir.file("d.csv"), demo_schema());

    CHECK(ds.n() == 3);
    // Numeric column first, then the one-hot block in lexicographic order.
    CHECK(ds.feature_names ==
          std::vector<std::string>{"age", "color=blue", "color=red"});
    CHECK(ds.col_group == std::vector<int>{-1, 0, 0});
    CHECK(ds.y == std::vector<int>{1, 0, 1});
    CHECK(ds.a == std::vector<int>{1, 0, 0});
    CHECK(ds.x.at(0, 0) == 30.0);
    CHECK(ds.x.at(0, 2) == 1.0);  // red
    CHECK(ds.x.at(1, 1) == 1.0);  // blue
    CHECK(ds.x.at(1, 2) == 0.0);
}

TEST_CASE("missing schema column raises SchemaError") {
    TempDir dir("schema");
    write_file(dir.file("d.csv"), "age,sex,class\n30,male,good\n");
    CHECK_THROWS_AS(load_csv(dir.file("d.csv"), demo_schema()), SchemaError);
}

TEST_CASE("row with missing target is dropped under drop_row") {
    TempDir dir("drop");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\n"
               "30,red,male,good\n"
               "40,blue,female,\n"
               "50,red,female,bad\n");
    const Dataset ds = load_csv(dir.file("d.csv"), demo_schema());
    CHECK(ds.n() == 2);
}

TEST_CASE("zero usable rows raises EmptyDatasetError") {
    TempDir dir("empty");
    write_file(dir.file("d.csv"), "age,color,sex,class\n,red,male,\n");
    CHECK_THROWS_AS(load_csv(dir.file("d.csv"), demo_schema()), EmptyDatasetError);
}

TEST_CASE("non-numeric garbage: dropped under drop_row, ParseError under impute") {
    TempDir dir("garbage");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\n"
               "thirty,red,male,good\n"
               "40,blue,female,bad\n");
    const Dataset dropped = load_csv(dir.file("d.csv"), demo_schema());
    CHECK(dropped.n() == 1);

    DatasetSchema impute = demo_schema();
    impute.na_policy = NaPolicy::ImputeModeMean;
    CHECK_THROWS_AS(load_csv(dir.file("d.csv"), impute), ParseError);
}

TEST_CASE("impute_mode_mean fills numeric mean and categorical mode") {
    TempDir dir("impute");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\n"
               "10,red,male,good\n"
               "20,red,female,bad\n"
               "?,blue,male,good\n"
               "30,?,female,bad\n");
    DatasetSchema schema = demo_schema();
    schema.na_policy = NaPolicy::ImputeModeMean;
    const Dataset ds = load_csv(dir.file("d.csv"), schema);
    CHECK(ds.n() == 4);
    CHECK(ds.x.at(2, 0) == doctest::Approx(20.0));  // mean of 10,20,30
    CHECK(ds.x.at(3, 2) == 1.0);                    // mode "red"
}

TEST_CASE("quoted fields and escaped quotes parse per RFC 4180") {
    TempDir dir("quotes");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\r\n"
               "30,\"re,d\",male,good\r\n"
               "40,\"bl\"\"ue\",female,bad\r\n");
    const Dataset ds = load_csv(dir.file("d.csv"), demo_schema());
    CHECK(ds.n() == 2);
    CHECK(ds.feature_names[1] == "color=bl\"ue");
    CHECK(ds.feature_names[2] == "color=re,d");
}

TEST_CASE("dataset round-trips through save_csv and the induced schema") {
    const Dataset ds = synthetic_biased(200, 0.25, 11);
    TempDir dir("roundtrip");
    save_csv(ds, dir.file("out.csv"));
    const Dataset back = load_csv(dir.file("out.csv"), induced_schema(ds));
    CHECK(back.x == ds.x);
    CHECK(back.y == ds.y);
    CHECK(back.a == ds.a);
}

TEST_CASE("encoding is deterministic for identical file and schema") {
    TempDir dir("determinism");
    write_file(dir.file("d.csv"),
               "age,color,sex,class\n"
               "30,red,male,good\n"
               "40,blue,female,bad\n"
               "50,green,female,good\n");
    const Dataset first = load_csv(dir.file("d.csv"), demo_schema());
    const Dataset second = load_csv(dir.file("d.csv"), demo_schema());
    CHECK(first.x == second.x);
    CHECK(first.feature_names == second.feature_names);
}

TEST_CASE("stratified_kfold balances folds and strata") {
    // n=10 balanced rows, k=5: folds of exactly 2.
    Dataset ds = test::make_cells({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0},
                                   {0, 1}, {1, 0}, {1, 1}, {0, 0}, {0, 1}});
    const FoldPlan plan = stratified_kfold(ds, 5, 3);
    std::array<int, 5> sizes{};
    for (int f : plan.assignments) ++sizes[f];
    for (int s : sizes) CHECK(s == 2);

    SUBCASE("same seed reproduces assignments") {
        const FoldPlan again = stratified_kfold(ds, 5, 3);
        CHECK(again.assignments == plan.assignments);
    }
    SUBCASE("fold partition covers all rows disjointly") {
        std::set<std::size_t> seen;
        for (int f = 0; f < plan.k; ++f) {
            for (std::size_t r : plan.test_rows(f)) CHECK(seen.insert(r).second);
        }
        CHECK(seen.size() == ds.n());
    }
}

TEST_CASE("stratum of 7 rows over 5 folds lands 1 or 2 per fold") {
    std::vector<std::pair<int, int>> ya(7, {1, 0});
    for (int i = 0; i < 5; ++i) {
        ya.push_back({0, 0});
        ya.push_back({0, 1});
        ya.push_back({1, 1});
    }
    Dataset ds = test::make_cells(ya);
    const FoldPlan plan = stratified_kfold(ds, 5, 99);
    std::array<int, 5> stratum_count{};
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.y[i] == 1 && ds.a[i] == 0) ++stratum_count[plan.assignments[i]];
    }
    for (int c : stratum_count) {
        CHECK(c >= 1);
        CHECK(c <= 2);
    }
}

TEST_CASE("fold plan serializes for audit") {
    Dataset ds = test::make_cells({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const FoldPlan plan = stratified_kfold(ds, 2, 8);
    const nlohmann::json j = plan.to_json();
    CHECK(j.at("k") == 2);
    CHECK(j.at("assignments").size() == 4);
}

TEST_CASE("k > n raises InvalidFoldError") {
    Dataset ds = test::make_cells({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK_THROWS_AS(stratified_kfold(ds, 5, 1), InvalidFoldError);
    CHECK_THROWS_AS(stratified_kfold(ds, 1, 1), InvalidFoldError);
}

TEST_CASE("synthetic_biased hits the requested label bias") {
    const Dataset biased = synthetic_biased(1000, 0.3, 7);
    CHECK(label_spd(biased) == doctest::Approx(-0.3).epsilon(0.17));
    CHECK(label_spd(biased) <= -0.25);
    CHECK(label_spd(biased) >= -0.35);

    const Dataset fair = synthetic_biased(1000, 0.0, 7);
    CHECK(std::abs(label_spd(fair)) <= 0.05);

    const Dataset s1 = synthetic_biased(100, 0.5, 1);
    const Dataset s2 = synthetic_biased(100, 0.5, 2);
    CHECK(s1.n() == s2.n());
    CHECK(s1.feature_names == s2.feature_names);
    CHECK(s1.x != s2.x);

    const Dataset s1_again = synthetic_biased(100, 0.5, 1);
    CHECK(s1_again.x == s1.x);
}

TEST_CASE("schema JSON round-trip") {
    DatasetSchema s = demo_schema();
    s.na_policy = NaPolicy::ImputeModeMean;
    const DatasetSchema back = DatasetSchema::from_json(s.to_json());
    CHECK(back.target_column == s.target_column);
    CHECK(back.favorable_label == s.favorable_label);
    CHECK(back.feature_columns.size() == 2);
    CHECK(back.na_policy == NaPolicy::ImputeModeMean);
}

TEST_CASE("schema invariants are enforced") {
    DatasetSchema s = demo_schema();
    s.protected_column = "class";
    CHECK_THROWS_AS(s.validate(), SchemaError);

    DatasetSchema dup = demo_schema();
    dup.feature_columns.push_back({"class", ColumnKind::Numeric});
    CHECK_THROWS_AS(dup.validate(), SchemaError);
}
