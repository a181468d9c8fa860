#include "fate/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "fate/csv.hpp"
#include "fate/errors.hpp"
#include "fate/kernels.hpp"
#include "fate/parallel.hpp"
#include "fate/stats.hpp"

namespace fate {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kRepTag = 0x726570ULL;     // "rep"
constexpr std::uint64_t kFoldsTag = 0x666f6c64ULL;

const std::vector<std::string> kComparisonHeader = {
    "schema_version", "arm",    "dataset", "model",  "repetition", "seed",
    "config_hash",    "execution_time_seconds",      "fitness",    "ps",
    "fs",             "precision", "recall", "pr_auc", "spd",      "eod",
    "di",             "detail", "error"};

const std::vector<std::string> kSweepHeader = {
    "schema_version", "arm",       "dataset", "model",  "repetition", "population",
    "generations",    "crossover_rate",       "mutation_rate",        "seed",
    "config_hash",    "fitness",   "ps",      "fs",     "precision",  "recall",
    "pr_auc",         "spd",       "eod",     "di",     "detail",     "error"};

const std::vector<std::string> kStatsHeader = {
    "schema_version", "hypothesis", "metric", "baseline",  "n_x",    "n_y",
    "u_statistic",    "p_value",    "a12",    "magnitude", "direction",
    "method",         "reject_at_0.05"};

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

std::uint64_t rep_seed_of(const ExperimentConfig& cfg, int repetition) {
    return derive_seed(cfg.seed, kRepTag, static_cast<std::uint64_t>(repetition));
}

FoldPlan plan_for_rep(const ExperimentConfig& cfg, const Dataset& ds, int repetition) {
    return stratified_kfold(ds, cfg.ga.k_folds,
                            derive_seed(rep_seed_of(cfg, repetition), kFoldsTag));
}

GAConfig ga_config_for_cell(const ExperimentConfig& cfg, const ClassifierSpec& model,
                            int repetition) {
    GAConfig ga = cfg.ga;
    ga.seed = derive_seed(rep_seed_of(cfg, repetition), hash_str(model.name()));
    ga.jobs = 1;  // cells parallelize above this level
    return ga;
}

PrepFn prep_for_arm(const BaselineArm& arm) {
    if (arm.name == "no_prep") {
        return [](const Dataset& train, const Dataset& test, std::uint64_t) {
            return std::make_pair(train, test);
        };
    }
    if (arm.name == "reweighing") {
        return [](const Dataset& train, const Dataset& test, std::uint64_t) {
            return std::make_pair(reweighing(train), test);
        };
    }
    if (arm.name == "fairsmote") {
        const SmoteParams params = arm.smote;
        return [params](const Dataset& train, const Dataset& test, std::uint64_t seed) {
            SmoteParams p = params;
            p.seed = seed;
            return std::make_pair(fair_smote(train, p), test);
        };
    }
    if (arm.name == "dir") {
        const RepairLevel level = arm.repair;
        return [level](const Dataset& train, const Dataset& test, std::uint64_t) {
            return disparate_impact_remover(train, test, level);
        };
    }
    throw ConfigError("unknown baseline arm: " + arm.name);
}

BaselineArm find_arm(const ExperimentConfig& cfg, const std::string& name) {
    for (const auto& arm : cfg.baselines) {
        if (arm.name == name) return arm;
    }
    BaselineArm arm;
    arm.name = name;
    arm.validate();
    return arm;
}

double metric_value(const ComparisonRecord& rec, const std::string& metric) {
    if (metric == "fs") return rec.report.fs;
    if (metric == "ps") return rec.report.ps;
    if (metric == "time") return rec.execution_time_seconds;
    throw Error("unknown metric: " + metric);
}

std::vector<std::string> comparison_row(const ComparisonRecord& rec,
                                        const std::string& config_hash) {
    std::vector<std::string> row;
    row.push_back(kResultsSchemaVersion);
    row.push_back(rec.arm);
    row.push_back(rec.dataset);
    row.push_back(rec.model);
    row.push_back(std::to_string(rec.repetition));
    row.push_back(std::to_string(rec.seed));
    row.push_back(config_hash);
    if (rec.error.empty()) {
        row.push_back(csv::format_double(rec.execution_time_seconds));
        row.push_back(csv::format_double(rec.report.fitness));
        row.push_back(csv::format_double(rec.report.ps));
        row.push_back(csv::format_double(rec.report.fs));
        row.push_back(csv::format_double(rec.report.precision));
        row.push_back(csv::format_double(rec.report.recall));
        row.push_back(csv::format_double(rec.report.pr_auc));
        row.push_back(csv::format_double(rec.report.spd));
        row.push_back(csv::format_double(rec.report.eod));
        row.push_back(csv::format_double(rec.report.di));
    } else {
        for (int i = 0; i < 10; ++i) row.emplace_back();
    }
    row.push_back(rec.detail);
    row.push_back(rec.error);
    return row;
}

void ensure_output_dir(const ExperimentConfig& cfg) {
    if (!cfg.output_dir.empty()) fs::create_directories(cfg.output_dir);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
    return (fs::path(cfg.output_dir) / file).string();
}

}  // namespace

void BaselineArm::validate() const {
    static const std::unordered_set<std::string> known{"fairsmote", "reweighing", "dir",
                                                       "no_prep"};
    if (!known.count(name)) throw ConfigError("unknown baseline: " + name);
    if (smote.k_neighbors < 1) throw ConfigError("fairsmote k_neighbors must be >= 1");
    if (repair.lambda < 0 || repair.lambda > 1) {
        throw ConfigError("dir lambda must lie in [0,1]");
    }
}

nlohmann::json BaselineArm::to_json() const {
    nlohmann::json j{{"name", name}};
    if (name == "fairsmote") j["k_neighbors"] = smote.k_neighbors;
    if (name == "dir") j["lambda"] = repair.lambda;
    return j;
}

BaselineArm BaselineArm::from_json(const nlohmann::json& j) {
    BaselineArm arm;
    arm.name = j.at("name").get<std::string>();
    if (j.contains("k_neighbors")) arm.smote.k_neighbors = j.at("k_neighbors").get<int>();
    if (j.contains("lambda")) arm.repair.lambda = j.at("lambda").get<double>();
    arm.validate();
    return arm;
}

void SweepGrid::validate() const {
    if (population.empty() || generations.empty() || crossover_rate.empty() ||
        mutation_rate.empty()) {
        throw ConfigError("sweep grid lists must be nonempty");
    }
}

nlohmann::json SweepGrid::to_json() const {
    return {{"population", population},
            {"generations", generations},
            {"crossover_rate", crossover_rate},
            {"mutation_rate", mutation_rate}};
}

SweepGrid SweepGrid::from_json(const nlohmann::json& j) {
    SweepGrid g;
    if (j.contains("population")) g.population = j.at("population").get<std::vector<int>>();
    if (j.contains("generations")) g.generations = j.at("generations").get<std::vector<int>>();
    if (j.contains("crossover_rate")) {
        g.crossover_rate = j.at("crossover_rate").get<std::vector<double>>();
    }
    if (j.contains("mutation_rate")) {
        g.mutation_rate = j.at("mutation_rate").get<std::vector<double>>();
    }
    g.validate();
    return g;
}

void ExperimentConfig::validate() const {
    if (dataset_csv.empty()) throw ConfigError("config is missing dataset.csv");
    if (schema_path.empty()) throw ConfigError("config is missing dataset.schema");
    if (models.empty()) throw ConfigError("config lists no models");
    for (const auto& m : models) m.validate();
    ga.validate();
    for (const auto& b : baselines) b.validate();
    if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (!fs::exists(dataset_csv)) throw ConfigError("dataset file not found: " + dataset_csv);
    if (!fs::exists(schema_path)) throw ConfigError("schema file not found: " + schema_path);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    return from_json(j, fs::path(path).parent_path().string());
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j,
                                             const std::string& base_dir) {
    ExperimentConfig cfg;
    cfg.ga.catalog = default_catalog();
    try {
        const auto& ds = j.at("dataset");
        cfg.dataset_csv = resolve_path(base_dir, ds.at("csv").get<std::string>());
        cfg.schema_path = resolve_path(base_dir, ds.at("schema").get<std::string>());
        cfg.dataset_name = ds.contains("name") ? ds.at("name").get<std::string>()
                                               : fs::path(cfg.dataset_csv).stem().string();
        for (const auto& m : j.at("models")) cfg.models.push_back(ClassifierSpec::from_json(m));
        if (j.contains("ga")) cfg.ga = GAConfig::from_json(j.at("ga"));
        if (j.contains("sweep")) cfg.sweep = SweepGrid::from_json(j.at("sweep"));
        if (j.contains("baselines")) {
            for (const auto& b : j.at("baselines")) {
                cfg.baselines.push_back(BaselineArm::from_json(b));
            }
        }
        if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<int>();
        if (j.contains("output")) {
            cfg.output_dir = resolve_path(base_dir, j.at("output").get<std::string>());
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

nlohmann::json ExperimentConfig::identity_json() const {
    nlohmann::json baselines_json = nlohmann::json::array();
    for (const auto& b : baselines) baselines_json.push_back(b.to_json());
    nlohmann::json models_json = nlohmann::json::array();
    for (const auto& m : models) models_json.push_back(m.to_json());
    return {{"dataset", {{"csv", dataset_csv}, {"schema", schema_path}, {"name", dataset_name}}},
            {"models", models_json},
            {"ga", ga.to_json()},
            {"sweep", sweep.to_json()},
            {"baselines", baselines_json},
            {"repetitions", repetitions},
            {"seed", seed}};
}

std::string ExperimentConfig::config_hash() const {
    const std::uint64_t h = hash_str(identity_json().dump());
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

void write_csv_table(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, bool append) {
    std::ostringstream header_line;
    csv::write_row(header_line, header);

    const bool exists = fs::exists(path) && fs::file_size(path) > 0;
    if (append && exists) {
        std::ifstream in(path, std::ios::binary);
        std::string first_line;
        std::getline(in, first_line);
        first_line += '\n';
        if (first_line != header_line.str()) {
            throw Error("CSV header mismatch on append to " + path +
                        " (schema changed between runs)");
        }
    }
    std::ofstream out(path, append && exists ? std::ios::app : std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    if (!append || !exists) out << header_line.str();
    for (const auto& row : rows) csv::write_row(out, row);
}

ComparisonRecord run_compare_cell(const ExperimentConfig& cfg, const Dataset& ds,
                                  const std::string& arm, const ClassifierSpec& model,
                                  int repetition) {
    ComparisonRecord rec;
    rec.arm = arm;
    rec.dataset = cfg.dataset_name;
    rec.model = model.name();
    rec.repetition = repetition;
    rec.seed = rep_seed_of(cfg, repetition);

    try {
        const FoldPlan plan = plan_for_rep(cfg, ds, repetition);
        if (arm == "fate") {
            const GAConfig ga_cfg = ga_config_for_cell(cfg, model, repetition);
            const RunResult result = run(ga_cfg, ds, model, &plan);
            const Pipeline best = result.best.pipeline;
            double elapsed = 0;
            rec.report = evaluate_prep_on_folds(
                ds, plan, model, ga_cfg.weights,
                evaluation_seed_root(ga_cfg, best.canonical()),
                [&best](const Dataset& train, const Dataset& test, std::uint64_t seed) {
                    return apply_pipeline(best, train, test, seed);
                },
                &elapsed);
            rec.execution_time_seconds = elapsed;
            rec.detail = best.canonical();
            rec.error = rec.report.error;
        } else {
            const BaselineArm baseline = find_arm(cfg, arm);
            const std::uint64_t seed_root =
                derive_seed(rec.seed, hash_str(model.name()), hash_str(arm));
            double elapsed = 0;
            rec.report = evaluate_prep_on_folds(ds, plan, model, cfg.ga.weights, seed_root,
                                                prep_for_arm(baseline), &elapsed);
            rec.execution_time_seconds = elapsed;
            rec.error = rec.report.error;
        }
    } catch (const Error& e) {
        rec.error = e.what();
    }
    return rec;
}

int cmd_optimize(const ExperimentConfig& cfg) {
    cfg.validate();
    const DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    const Dataset ds = load_csv(cfg.dataset_csv, schema);

    GAConfig ga_cfg = cfg.ga;
    ga_cfg.seed = cfg.seed;
    ga_cfg.jobs = cfg.jobs;
    ga_cfg.validate();

    const ClassifierSpec& model = cfg.models.front();
    const RunResult result = run(ga_cfg, ds, model);

    ensure_output_dir(cfg);
    {
        std::ofstream out(out_path(cfg, "best_pipeline.json"), std::ios::binary);
        out << result.best.pipeline.to_json().dump(2) << '\n';
    }
    {
        nlohmann::json report = result.to_json();
        report["seed"] = cfg.seed;
        report["config_hash"] = cfg.config_hash();
        report["model"] = model.to_json();
        std::ofstream out(out_path(cfg, "report.json"), std::ios::binary);
        out << report.dump(2) << '\n';
    }
    {
        std::ofstream out(out_path(cfg, "history.csv"), std::ios::binary);
        result.history_csv(out);
    }
    {
        std::ofstream out(out_path(cfg, "run.log"));
        out << "dataset=" << cfg.dataset_name << " n=" << ds.n() << " d=" << ds.d() << '\n'
            << "model=" << model.name() << '\n'
            << "seed=" << cfg.seed << " config_hash=" << cfg.config_hash() << '\n'
            << "kernel_backend=" << kernels::backend_name(kernels::active_backend()) << '\n'
            << "generations=" << ga_cfg.generations << " population=" << ga_cfg.population
            << '\n'
            << "best_pipeline=" << result.best.pipeline.canonical() << '\n'
            << "best_fitness=" << csv::format_double(result.best.fitness()) << '\n'
            << "wall_time_seconds=" << csv::format_double(result.wall_time_seconds) << '\n';
    }
    std::cout << "[optimize] best pipeline: " << result.best.pipeline.canonical() << '\n'
              << "[optimize] fitness=" << csv::format_double(result.best.fitness())
              << " ps=" << csv::format_double(result.best.report->ps)
              << " fs=" << csv::format_double(result.best.report->fs) << '\n'
              << "[optimize] artifacts written to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    cfg.sweep.validate();
    const DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    const Dataset ds = load_csv(cfg.dataset_csv, schema);
    const std::string config_hash = cfg.config_hash();

    struct Cell {
        std::size_t model_idx;
        int repetition;
        std::string arm;             // "fate" or baseline arm name
        const Practice* practice;    // single-practice baseline rows
        int population, generations; // fate rows
        double crossover, mutation;
    };
    std::vector<Cell> cells;
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            cells.push_back({mi, rep, "no_prep", nullptr, 0, 0, 0, 0});
            for (const auto& practice : cfg.ga.catalog) {
                cells.push_back({mi, rep, "practice", &practice, 0, 0, 0, 0});
            }
            for (int population : cfg.sweep.population) {
                for (int generations : cfg.sweep.generations) {
                    for (double cx : cfg.sweep.crossover_rate) {
                        for (double mut : cfg.sweep.mutation_rate) {
                            cells.push_back({mi, rep, "fate", nullptr, population,
                                             generations, cx, mut});
                        }
                    }
                }
            }
        }
    }

    std::vector<std::vector<std::string>> rows(cells.size());
    parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
        const Cell& cell = cells[ci];
        const ClassifierSpec& model = cfg.models[cell.model_idx];
        const std::uint64_t rep_seed = rep_seed_of(cfg, cell.repetition);

        std::vector<std::string> row;
        row.push_back(kResultsSchemaVersion);
        std::string arm = cell.arm;
        std::string detail;
        EvalReport report;
        std::string error;
        try {
            const FoldPlan plan = plan_for_rep(cfg, ds, cell.repetition);
            if (cell.arm == "fate") {
                GAConfig ga_cfg = ga_config_for_cell(cfg, model, cell.repetition);
                ga_cfg.population = cell.population;
                ga_cfg.generations = cell.generations;
                ga_cfg.crossover_rate = cell.crossover;
                ga_cfg.mutation_rate = cell.mutation;
                const RunResult result = run(ga_cfg, ds, model, &plan);
                report = *result.best.report;
                detail = result.best.pipeline.canonical();
            } else if (cell.arm == "practice") {
                const Practice practice = *cell.practice;
                arm = "practice:" + practice.name();
                Pipeline single;
                single.steps = {practice};
                const GAConfig ga_cfg = ga_config_for_cell(cfg, model, cell.repetition);
                report = evaluate_prep_on_folds(
                    ds, plan, model, cfg.ga.weights,
                    evaluation_seed_root(ga_cfg, single.canonical()),
                    [&single](const Dataset& train, const Dataset& test, std::uint64_t seed) {
                        return apply_pipeline(single, train, test, seed);
                    });
                error = report.error;
                detail = practice.name();
            } else {
                const std::uint64_t seed_root =
                    derive_seed(rep_seed, hash_str(model.name()), hash_str(cell.arm));
                report = evaluate_prep_on_folds(ds, plan, model, cfg.ga.weights, seed_root,
                                                prep_for_arm(find_arm(cfg, cell.arm)));
                error = report.error;
            }
            if (error.empty()) error = report.error;
        } catch (const Error& e) {
            error = e.what();
        }

        row.push_back(arm);
        row.push_back(cfg.dataset_name);
        row.push_back(model.name());
        row.push_back(std::to_string(cell.repetition));
        if (cell.arm == "fate") {
            row.push_back(std::to_string(cell.population));
            row.push_back(std::to_string(cell.generations));
            row.push_back(csv::format_double(cell.crossover));
            row.push_back(csv::format_double(cell.mutation));
        } else {
            for (int i = 0; i < 4; ++i) row.emplace_back();
        }
        row.push_back(std::to_string(rep_seed));
        row.push_back(config_hash);
        if (error.empty()) {
            row.push_back(csv::format_double(report.fitness));
            row.push_back(csv::format_double(report.ps));
            row.push_back(csv::format_double(report.fs));
            row.push_back(csv::format_double(report.precision));
            row.push_back(csv::format_double(report.recall));
            row.push_back(csv::format_double(report.pr_auc));
            row.push_back(csv::format_double(report.spd));
            row.push_back(csv::format_double(report.eod));
            row.push_back(csv::format_double(report.di));
        } else {
            for (int i = 0; i < 9; ++i) row.emplace_back();
        }
        row.push_back(detail);
        row.push_back(error);
        rows[ci] = std::move(row);
    });

    ensure_output_dir(cfg);
    write_csv_table(out_path(cfg, "results.csv"), kSweepHeader, rows);
    std::cout << "[sweep] " << rows.size() << " rows written to "
              << out_path(cfg, "results.csv") << '\n';
    return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.baselines.empty()) throw ConfigError("compare requires at least one baseline");
    const DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    const Dataset ds = load_csv(cfg.dataset_csv, schema);
    const std::string config_hash = cfg.config_hash();

    std::vector<std::string> arms{"fate"};
    for (const auto& b : cfg.baselines) arms.push_back(b.name);

    struct Cell {
        std::size_t model_idx;
        int repetition;
        std::string arm;
    };
    std::vector<Cell> cells;
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            for (const auto& arm : arms) cells.push_back({mi, rep, arm});
        }
    }

    std::vector<ComparisonRecord> records(cells.size());
    parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
        const Cell& cell = cells[ci];
        records[ci] = run_compare_cell(cfg, ds, cell.arm, cfg.models[cell.model_idx],
                                       cell.repetition);
    });

    std::vector<std::vector<std::string>> rows;
    rows.reserve(records.size());
    for (const auto& record : records) {
        rows.push_back(comparison_row(record, config_hash));
    }

    ensure_output_dir(cfg);
    write_csv_table(out_path(cfg, "comparison.csv"), kComparisonHeader, rows);

    // Hypothesis tests: FATE vs each baseline on fs, ps and execution time.
    // A sample point is one (dataset, model, repetition) cell.
    const std::vector<std::pair<std::string, std::string>> metric_families = {
        {"fs", "H1"}, {"ps", "H2"}, {"time", "H3"}};
    std::vector<std::vector<std::string>> stat_rows;
    for (std::size_t bi = 0; bi < cfg.baselines.size(); ++bi) {
        const std::string& baseline = cfg.baselines[bi].name;
        const char letter = static_cast<char>('a' + bi);
        for (const auto& [metric, family] : metric_families) {
            std::vector<double> x, y;
            for (const auto& rec : records) {
                if (!rec.error.empty()) continue;
                if (rec.arm == "fate") x.push_back(metric_value(rec, metric));
                else if (rec.arm == baseline) y.push_back(metric_value(rec, metric));
            }
            std::vector<std::string> row{kResultsSchemaVersion, family + letter, metric,
                                         baseline};
            if (x.empty() || y.empty()) {
                row.insert(row.end(), {"0", "0", "", "", "", "", "", "", ""});
            } else {
                const StatTestResult t = wilcoxon_rank_sum(x, y);
                row.push_back(std::to_string(t.n_x));
                row.push_back(std::to_string(t.n_y));
                row.push_back(csv::format_double(t.u_statistic));
                row.push_back(csv::format_double(t.p_value));
                row.push_back(csv::format_double(t.a12));
                row.push_back(t.magnitude);
                row.push_back(direction_name(t.direction));
                row.push_back(method_name(t.method));
                row.push_back(t.p_value < 0.05 ? "true" : "false");
            }
            stat_rows.push_back(std::move(row));
        }
    }
    write_csv_table(out_path(cfg, "stats.csv"), kStatsHeader, stat_rows);

    std::cout << "[compare] " << rows.size() << " comparison records, " << stat_rows.size()
              << " hypothesis rows (alpha=0.05, no multiple-comparison correction)\n"
              << "[compare] outputs: " << out_path(cfg, "comparison.csv") << ", "
              << out_path(cfg, "stats.csv") << '\n';
    return 0;
}

int cmd_baseline(const ExperimentConfig& cfg, const std::string& baseline_name) {
    cfg.validate();
    const BaselineArm arm = find_arm(cfg, baseline_name);
    const DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    const Dataset ds = load_csv(cfg.dataset_csv, schema);

    const ComparisonRecord rec =
        run_compare_cell(cfg, ds, arm.name, cfg.models.front(), /*repetition=*/0);
    if (!rec.error.empty()) throw Error("baseline evaluation failed: " + rec.error);

    nlohmann::json j{{"baseline", arm.to_json()},
                     {"dataset", cfg.dataset_name},
                     {"model", cfg.models.front().name()},
                     {"seed", rec.seed},
                     {"config_hash", cfg.config_hash()},
                     {"execution_time_seconds", rec.execution_time_seconds},
                     {"report", rec.report.to_json()}};
    ensure_output_dir(cfg);
    const std::string path = out_path(cfg, "baseline_" + arm.name + ".json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    std::cout << "[baseline] " << arm.name << ": fitness="
              << csv::format_double(rec.report.fitness)
              << " ps=" << csv::format_double(rec.report.ps)
              << " fs=" << csv::format_double(rec.report.fs) << '\n'
              << "[baseline] report written to " << path << '\n';
    return 0;
}

int cmd_replay(const ExperimentConfig& cfg, const std::string& pipeline_json_path) {
    cfg.validate();
    std::ifstream in(pipeline_json_path);
    if (!in) throw ConfigError("cannot open pipeline file: " + pipeline_json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid pipeline JSON: ") + e.what());
    }
    const Pipeline pipeline = Pipeline::from_json(j);

    const DatasetSchema schema = DatasetSchema::load(cfg.schema_path);
    const Dataset ds = load_csv(cfg.dataset_csv, schema);

    // Same evaluation context as cmd_optimize, so replaying an optimize
    // run's best_pipeline.json reproduces its report.json metrics exactly.
    GAConfig ga_cfg = cfg.ga;
    ga_cfg.seed = cfg.seed;
    const ClassifierSpec& model = cfg.models.front();
    const FoldPlan plan = run_fold_plan(ga_cfg, ds);

    double elapsed = 0;
    const EvalReport report = evaluate_prep_on_folds(
        ds, plan, model, ga_cfg.weights, evaluation_seed_root(ga_cfg, pipeline.canonical()),
        [&pipeline](const Dataset& train, const Dataset& test, std::uint64_t seed) {
            return apply_pipeline(pipeline, train, test, seed);
        },
        &elapsed);
    if (!report.ok()) throw Error("pipeline replay failed: " + report.error);

    nlohmann::json out_json{{"pipeline", pipeline.to_json()},
                            {"dataset", cfg.dataset_name},
                            {"model", model.name()},
                            {"seed", cfg.seed},
                            {"config_hash", cfg.config_hash()},
                            {"execution_time_seconds", elapsed},
                            {"report", report.to_json()}};
    ensure_output_dir(cfg);
    const std::string path = out_path(cfg, "replay_report.json");
    std::ofstream out(path, std::ios::binary);
    out << out_json.dump(2) << '\n';
    std::cout << "[replay] " << pipeline.canonical()
              << ": fitness=" << csv::format_double(report.fitness)
              << " ps=" << csv::format_double(report.ps)
              << " fs=" << csv::format_double(report.fs) << '\n'
              << "[replay] report written to " << path << '\n';
    return 0;
}

int cmd_metrics(const std::string& predictions_csv, const FitnessWeights& weights,
                const std::string& out_path_arg) {
    const csv::Table table = csv::read_file(predictions_csv);
    const int score_col = table.column("score");
    const int label_col = table.column("label");
    const int prot_col = table.column("protected");
    if (score_col < 0 || label_col < 0 || prot_col < 0) {
        throw SchemaError("predictions file needs columns: score,label,protected");
    }

    std::vector<double> scores;
    std::vector<int> labels, groups, preds;
    for (const auto& row : table.rows) {
        scores.push_back(csv::parse_double(row[score_col]));
        if (!std::isfinite(scores.back())) {
            throw ParseError("non-finite score: '" + row[score_col] + "'");
        }
        const double label = csv::parse_double(row[label_col]);
        const double grp = csv::parse_double(row[prot_col]);
        if ((label != 0 && label != 1) || (grp != 0 && grp != 1)) {
            throw ParseError("label/protected columns must be 0 or 1");
        }
        labels.push_back(static_cast<int>(label));
        groups.push_back(static_cast<int>(grp));
        preds.push_back(scores.back() >= 0.5 ? 1 : 0);
    }
    if (scores.empty()) throw EmptyDatasetError("predictions file has no rows");

    const auto [precision, recall] = precision_recall(confusion(preds, labels));
    const double auc = pr_auc(scores, labels);
    const GroupFairness g = group_fairness(preds, labels, groups);
    const FitnessBreakdown b = fitness(auc, g.spd, g.eod, g.di, weights);

    nlohmann::json j{{"precision", precision}, {"recall", recall},   {"pr_auc", auc},
                     {"spd", g.spd},           {"eod", g.eod},       {"di", g.di},
                     {"ps", b.ps},             {"fs", b.fs},         {"fitness", b.fitness},
                     {"weights", weights.to_json()},
                     {"n", scores.size()},     {"threshold", 0.5}};
    std::cout << j.dump(2) << '\n';
    if (!out_path_arg.empty()) {
        std::ofstream out(out_path_arg, std::ios::binary);
        out << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace fate
