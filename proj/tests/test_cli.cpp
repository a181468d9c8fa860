#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "fate/dataset.hpp"
#include "helpers.hpp"

using namespace fate;
using test::TempDir;
using test::read_file;
using test::write_file;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FATE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_demo_inputs(const TempDir& dir) {
    const Dataset ds = synthetic_biased(200, 0.3, 5);
    save_csv(ds, dir.file("data.csv"));
    induced_schema(ds).save(dir.file("schema.json"));
    write_file(dir.file("config.json"), R"({
  "dataset": {"csv": "data.csv", "schema": "schema.json", "name": "synth"},
  "models": [{"family": "logistic_regression", "epochs": 80}],
  "ga": {"generations": 2, "population": 4, "crossover_rate": 0.5,
         "mutation_rate": 0.5, "l_max": 3, "k_folds": 3},
  "baselines": [{"name": "reweighing"}],
  "repetitions": 1,
  "output": "out",
  "seed": 7
})");
}

}  // namespace

TEST_CASE("optimize runs twice to byte-identical best_pipeline.json") {
    TempDir dir("cli_opt");
    write_demo_inputs(dir);
    REQUIRE(run_cli("optimize --config " + dir.file("config.json") + " --out " +
                    dir.file("o1")) == 0);
    REQUIRE(run_cli("optimize --config " + dir.file("config.json") + " --out " +
                    dir.file("o2") + " --jobs 2") == 0);
    const std::string a = read_file(dir.file("o1") + "/best_pipeline.json");
    const std::string b = read_file(dir.file("o2") + "/best_pipeline.json");
    CHECK_FALSE(a.empty());
    CHECK(a == b);
}

TEST_CASE("missing dataset exits 2 and writes no artifacts") {
    TempDir dir("cli_missing");
    write_demo_inputs(dir);
    std::filesystem::remove(dir.file("data.csv"));
    CHECK(run_cli("optimize --config " + dir.file("config.json") + " --out " +
                  dir.file("never")) == 2);
    CHECK_FALSE(std::filesystem::exists(dir.file("never")));
}

TEST_CASE("invalid config exits 2") {
    TempDir dir("cli_badcfg");
    write_file(dir.file("bad.json"), "{");
    CHECK(run_cli("optimize --config " + dir.file("bad.json")) == 2);
    CHECK(run_cli("optimize") == 2);  // --config required
}

TEST_CASE("seed override changes the run identity") {
    TempDir dir("cli_seed");
    write_demo_inputs(dir);
    REQUIRE(run_cli("optimize --config " + dir.file("config.json") + " --out " +
                    dir.file("s7")) == 0);
    REQUIRE(run_cli("optimize --config " + dir.file("config.json") + " --seed 8 --out " +
                    dir.file("s8")) == 0);
    const std::string log7 = read_file(dir.file("s7") + "/run.log");
    const std::string log8 = read_file(dir.file("s8") + "/run.log");
    CHECK(log7.find("seed=7") != std::string::npos);
    CHECK(log8.find("seed=8") != std::string::npos);
}

TEST_CASE("baseline and metrics subcommands run end to end") {
    TempDir dir("cli_base");
    write_demo_inputs(dir);
    CHECK(run_cli("baseline --baseline reweighing --config " + dir.file("config.json") +
                  " --out " + dir.file("b")) == 0);
    CHECK(std::filesystem::exists(dir.file("b") + "/baseline_reweighing.json"));

    write_file(dir.file("preds.csv"),
               "score,label,protected\n0.9,1,0\n0.4,0,1\n0.8,1,1\n0.3,0,0\n");
    CHECK(run_cli("metrics --predictions " + dir.file("preds.csv")) == 0);
    CHECK(run_cli("metrics --predictions " + dir.file("nope.csv")) == 2);
}

TEST_CASE("synth generates a loadable dataset + schema pair") {
    TempDir dir("cli_synth");
    REQUIRE(run_cli("synth --n 120 --bias 0.2 --seed 3 --out " + dir.file("s.csv") +
                    " --schema-out " + dir.file("s.json")) == 0);
    const DatasetSchema schema = DatasetSchema::load(dir.file("s.json"));
    const Dataset ds = load_csv(dir.file("s.csv"), schema);
    CHECK(ds.n() == 120);
}

TEST_CASE("replay reproduces the optimize report from best_pipeline.json") {
    TempDir dir("cli_replay");
    write_demo_inputs(dir);
    REQUIRE(run_cli("optimize --config " + dir.file("config.json") + " --out " +
                    dir.file("o")) == 0);
    REQUIRE(run_cli("replay --pipeline " + dir.file("o") + "/best_pipeline.json --config " +
                    dir.file("config.json") + " --out " + dir.file("r")) == 0);

    // The replayed report's headline metrics must equal the optimize run's.
    const nlohmann::json report =
        nlohmann::json::parse(read_file(dir.file("o") + "/report.json"));
    const nlohmann::json replay =
        nlohmann::json::parse(read_file(dir.file("r") + "/replay_report.json"));
    CHECK(replay.at("report").at("fitness") == report.at("best_report").at("fitness"));
    CHECK(replay.at("report").at("fs") == report.at("best_report").at("fs"));
    CHECK(replay.at("pipeline") == report.at("best_pipeline"));

    CHECK(run_cli("replay --pipeline " + dir.file("nope.json") + " --config " +
                  dir.file("config.json")) == 2);
}

TEST_CASE("compare subcommand produces the two CSV artifacts") {
    TempDir dir("cli_cmp");
    write_demo_inputs(dir);
    REQUIRE(run_cli("compare --config " + dir.file("config.json") + " --out " +
                    dir.file("c") + " --jobs 2") == 0);
    CHECK(std::filesystem::exists(dir.file("c") + "/comparison.csv"));
    CHECK(std::filesystem::exists(dir.file("c") + "/stats.csv"));
}
