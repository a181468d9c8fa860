#include "fate/ga.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "fate/csv.hpp"
#include "fate/errors.hpp"
#include "fate/parallel.hpp"

namespace fate {

namespace {

constexpr std::uint64_t kFoldTag = 0x666f6c64ULL;    // "fold"
constexpr std::uint64_t kInitTag = 0x696e6974ULL;    // "init"
constexpr std::uint64_t kLoopTag = 0x6c6f6f70ULL;    // "loop"
constexpr std::uint64_t kEvalTag = 0x6576616cULL;    // "eval"
constexpr std::uint64_t kModelTag = 0x6d6f646cULL;   // "modl"
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void GAConfig::validate() const {
    if (generations < 1) throw ConfigError("generations must be at least 1");
    if (population < 2) throw ConfigError("population must be at least 2");
    if (crossover_rate < 0 || crossover_rate > 1) {
        throw ConfigError("crossover_rate must lie in [0,1]");
    }
    if (mutation_rate < 0 || mutation_rate > 1) {
        throw ConfigError("mutation_rate must lie in [0,1]");
    }
    if (l_max < 1) throw ConfigError("l_max must be at least 1");
    if (k_folds < 2) throw ConfigError("k_folds must be at least 2");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    weights.validate();
    if (catalog.empty()) throw ConfigError("practice catalog must not be empty");
    std::unordered_set<int> kinds;
    for (const auto& p : catalog) {
        p.validate();
        if (!kinds.insert(static_cast<int>(p.kind)).second) {
            throw ConfigError("practice catalog repeats kind " + practice_kind_name(p.kind));
        }
    }
}

nlohmann::json GAConfig::to_json() const {
    nlohmann::json cat = nlohmann::json::array();
    for (const auto& p : catalog) cat.push_back(p.to_json());
    return {{"generations", generations},
            {"population", population},
            {"crossover_rate", crossover_rate},
            {"mutation_rate", mutation_rate},
            {"l_max", l_max},
            {"k_folds", k_folds},
            {"seed", seed},
            {"weights", weights.to_json()},
            {"catalog", cat}};
}

GAConfig GAConfig::from_json(const nlohmann::json& j) {
    GAConfig cfg;
    cfg.catalog = default_catalog();
    if (j.contains("generations")) cfg.generations = j.at("generations").get<int>();
    if (j.contains("population")) cfg.population = j.at("population").get<int>();
    if (j.contains("crossover_rate")) cfg.crossover_rate = j.at("crossover_rate").get<double>();
    if (j.contains("mutation_rate")) cfg.mutation_rate = j.at("mutation_rate").get<double>();
    if (j.contains("l_max")) cfg.l_max = j.at("l_max").get<int>();
    if (j.contains("k_folds")) cfg.k_folds = j.at("k_folds").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("weights")) cfg.weights = FitnessWeights::from_json(j.at("weights"));
    if (j.contains("catalog")) {
        cfg.catalog.clear();
        for (const auto& p : j.at("catalog")) cfg.catalog.push_back(Practice::from_json(p));
    }
    cfg.validate();
    return cfg;
}

std::vector<Practice> default_catalog() {
    std::vector<Practice> catalog;
    for (PracticeKind k : {PracticeKind::StandardScale, PracticeKind::MinMaxScale,
                           PracticeKind::ResampleOver, PracticeKind::ResampleUnder,
                           PracticeKind::ResampleStratified, PracticeKind::ClusterRebalance,
                           PracticeKind::IPWeight, PracticeKind::Match}) {
        Practice p;
        p.kind = k;
        catalog.push_back(p);
    }
    return catalog;
}

double Individual::fitness() const {
    if (!report) return std::numeric_limits<double>::quiet_NaN();
    return report->ok() ? report->fitness : kNegInf;
}

nlohmann::json RunResult::to_json() const {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& g : history) {
        hist.push_back({{"generation", g.generation},
                        {"best_fitness", g.best_fitness},
                        {"mean_fitness", g.mean_fitness}});
    }
    nlohmann::json baselines(nlohmann::json::value_t::object);
    for (const auto& [name, report] : baseline_reports) {
        baselines[name] = report.to_json();
    }
    return {{"best_pipeline", best.pipeline.to_json()},
            {"best_report", best.report ? best.report->to_json() : nlohmann::json()},
            {"history", hist},
            {"baselines", baselines}};
}

void RunResult::history_csv(std::ostream& out) const {
    out << "generation,best_fitness,mean_fitness\n";
    for (const auto& g : history) {
        out << g.generation << ',' << csv::format_double(g.best_fitness) << ','
            << csv::format_double(g.mean_fitness) << '\n';
    }
}

EvalReport evaluate_prep_on_folds(const Dataset& ds, const FoldPlan& plan,
                                  const ClassifierSpec& spec, const FitnessWeights& fw,
                                  std::uint64_t seed_root, const PrepFn& prep,
                                  double* prep_train_seconds) {
    std::vector<FoldMetrics> folds;
    double elapsed = 0;
    for (int f = 0; f < plan.k; ++f) {
        try {
            const Dataset train_fold = ds.subset(plan.train_rows(f));
            const Dataset test_fold = ds.subset(plan.test_rows(f));
            const std::uint64_t fold_seed =
                derive_seed(seed_root, kFoldTag, static_cast<std::uint64_t>(f));

            const auto started = Clock::now();
            auto [train_prep, test_prep] = prep(train_fold, test_fold, fold_seed);
            ClassifierSpec fold_spec = spec;
            fold_spec.seed = derive_seed(seed_root, kModelTag, static_cast<std::uint64_t>(f),
                                         spec.seed);
            const TrainedModel model = train(fold_spec, train_prep);
            elapsed += seconds_since(started);

            const std::vector<double> scores = predict_scores(model, test_prep);
            const std::vector<int> preds = predict_labels(model, test_prep, 0.5);

            FoldMetrics m;
            const auto [precision, recall] = precision_recall(confusion(preds, test_prep.y));
            m.precision = precision;
            m.recall = recall;
            m.pr_auc = pr_auc(scores, test_prep.y);
            const GroupFairness g = group_fairness(preds, test_prep.y, test_prep.a);
            m.spd = g.spd;
            m.eod = g.eod;
            m.di = g.di;
            const FitnessBreakdown b = fitness(m.pr_auc, m.spd, m.eod, m.di, fw);
            m.ps = b.ps;
            m.fs = b.fs;
            m.fitness = b.fitness;
            folds.push_back(m);
        } catch (const Error& e) {
            return EvalReport::disqualified(
                "fold " + std::to_string(f) + ": " + e.what(), fw);
        }
    }
    if (prep_train_seconds) *prep_train_seconds += elapsed;
    return aggregate_folds(folds, fw);
}

std::uint64_t evaluation_seed_root(const GAConfig& cfg, const std::string& key) {
    return derive_seed(cfg.seed, kEvalTag, hash_str(key));
}

FoldPlan run_fold_plan(const GAConfig& cfg, const Dataset& ds) {
    return stratified_kfold(ds, cfg.k_folds, derive_seed(cfg.seed, kFoldTag));
}

Evaluator::Evaluator(const Dataset& ds, const ClassifierSpec& spec, const GAConfig& cfg,
                     FoldPlan plan)
    : ds_(ds), spec_(spec), cfg_(cfg), plan_(std::move(plan)) {}

EvalReport Evaluator::evaluate(const Pipeline& pipeline) {
    pipeline.validate(static_cast<std::size_t>(cfg_.l_max));
    const std::string key = pipeline.canonical();
    {
        std::lock_guard lock(mu_);
        const auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    const EvalReport report = evaluate_prep_on_folds(
        ds_, plan_, spec_, cfg_.weights, evaluation_seed_root(cfg_, key),
        [&pipeline](const Dataset& train, const Dataset& test, std::uint64_t seed) {
            return apply_pipeline(pipeline, train, test, seed);
        });
    std::lock_guard lock(mu_);
    ++evaluations_;
    memo_.emplace(key, report);
    return report;
}

EvalReport Evaluator::evaluate_no_prep() {
    return evaluate_prep_on_folds(
        ds_, plan_, spec_, cfg_.weights, evaluation_seed_root(cfg_, "no_prep"),
        [](const Dataset& train, const Dataset& test, std::uint64_t) {
            return std::make_pair(train, test);
        });
}

std::vector<Individual> initialize_population(const GAConfig& cfg) {
    cfg.validate();
    Rng rng = make_rng(derive_seed(cfg.seed, kInitTag));
    const std::size_t max_len =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.l_max), cfg.catalog.size());

    std::vector<Individual> population;
    population.reserve(cfg.population);
    std::vector<std::size_t> indices(cfg.catalog.size());
    for (int i = 0; i < cfg.population; ++i) {
        std::uniform_int_distribution<std::size_t> len_draw(1, max_len);
        const std::size_t len = len_draw(rng);
        std::iota(indices.begin(), indices.end(), 0);
        Individual ind;
        for (std::size_t g = 0; g < len; ++g) {
            std::uniform_int_distribution<std::size_t> pick(g, indices.size() - 1);
            std::swap(indices[g], indices[pick(rng)]);
            ind.pipeline.steps.push_back(cfg.catalog[indices[g]]);
        }
        population.push_back(std::move(ind));
    }
    return population;
}

std::vector<std::size_t> select_mating_pool(const std::vector<Individual>& population) {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    for (const auto& ind : population) {
        if (!ind.evaluated()) throw Error("selection requires an evaluated population");
    }
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double fi = population[i].fitness();
        const double fj = population[j].fitness();
        if (fi != fj) return fi > fj;
        const double fsi = population[i].report->fs;
        const double fsj = population[j].report->fs;
        if (fsi != fsj) return fsi < fsj;
        const std::string ci = population[i].pipeline.canonical();
        const std::string cj = population[j].pipeline.canonical();
        if (ci != cj) return ci < cj;
        return i < j;
    });
    const std::size_t pool_size = (population.size() + 1) / 2;
    order.resize(pool_size);
    return order;
}

std::pair<Individual, Individual> crossover(const Individual& p1, const Individual& p2,
                                            double rate, Rng& rng, std::size_t l_max) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) >= rate) return {p1, p2};  // copies, cached reports intact

    // Cut points: interior for length >= 2, either end for singletons.
    const auto draw_cut = [&rng](std::size_t len) -> std::size_t {
        if (len <= 1) {
            std::uniform_int_distribution<std::size_t> c(0, 1);
            return c(rng);
        }
        std::uniform_int_distribution<std::size_t> c(1, len - 1);
        return c(rng);
    };
    const std::size_t c1 = draw_cut(p1.pipeline.steps.size());
    const std::size_t c2 = draw_cut(p2.pipeline.steps.size());

    const auto splice = [l_max](const std::vector<Practice>& head, std::size_t head_len,
                                const std::vector<Practice>& tail, std::size_t tail_from,
                                const std::vector<Practice>& fallback) {
        std::vector<Practice> steps(head.begin(), head.begin() + head_len);
        steps.insert(steps.end(), tail.begin() + tail_from, tail.end());
        // De-duplicate kinds keeping the first occurrence.
        std::unordered_set<int> seen;
        std::vector<Practice> unique;
        for (const auto& p : steps) {
            if (seen.insert(static_cast<int>(p.kind)).second) unique.push_back(p);
        }
        if (unique.empty()) unique = fallback;
        if (unique.size() > l_max) unique.resize(l_max);
        Individual child;
        child.pipeline.steps = std::move(unique);
        return child;
    };

    Individual o1 = splice(p1.pipeline.steps, c1, p2.pipeline.steps, c2, p1.pipeline.steps);
    Individual o2 = splice(p2.pipeline.steps, c2, p1.pipeline.steps, c1, p2.pipeline.steps);
    return {std::move(o1), std::move(o2)};
}

Individual mutate(const Individual& ind, double rate, const std::vector<Practice>& catalog,
                  Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) >= rate) return ind;

    std::uniform_int_distribution<std::size_t> pos_draw(0, ind.pipeline.steps.size() - 1);
    const std::size_t pos = pos_draw(rng);

    std::unordered_set<int> present;
    for (const auto& p : ind.pipeline.steps) present.insert(static_cast<int>(p.kind));
    std::vector<const Practice*> candidates;
    for (const auto& p : catalog) {
        if (!present.count(static_cast<int>(p.kind))) candidates.push_back(&p);
    }
    if (candidates.empty()) return ind;  // nothing to replace with

    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    Individual out;
    out.pipeline = ind.pipeline;
    out.pipeline.steps[pos] = *candidates[pick(rng)];
    return out;  // report dropped: pipeline changed
}

namespace {

void evaluate_population(std::vector<Individual>& population, Evaluator& evaluator, int jobs) {
    // Evaluate unique un-evaluated pipelines in parallel; the memo handles
    // duplicates and the reduction is keyed by index.
    std::vector<std::size_t> pending;
    std::unordered_set<std::string> scheduled;
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (population[i].evaluated()) continue;
        if (scheduled.insert(population[i].pipeline.canonical()).second) pending.push_back(i);
    }
    parallel_for(pending.size(), jobs, [&](std::size_t idx) {
        const std::size_t i = pending[idx];
        population[i].report = evaluator.evaluate(population[i].pipeline);
    });
    for (auto& ind : population) {
        if (!ind.evaluated()) ind.report = evaluator.evaluate(ind.pipeline);  // memo hit
    }
}

GenerationStat summarize(const std::vector<Individual>& population, int generation) {
    GenerationStat stat;
    stat.generation = generation;
    stat.best_fitness = kNegInf;
    double sum = 0;
    std::size_t finite = 0;
    for (const auto& ind : population) {
        const double f = ind.fitness();
        stat.best_fitness = std::max(stat.best_fitness, f);
        if (std::isfinite(f)) {
            sum += f;
            ++finite;
        }
    }
    if (finite == 0) {
        throw Error("entire population disqualified in generation " +
                    std::to_string(generation));
    }
    stat.mean_fitness = sum / static_cast<double>(finite);
    return stat;
}

}  // namespace

RunResult run(const GAConfig& cfg, const Dataset& ds, const ClassifierSpec& spec,
              const FoldPlan* shared_plan) {
    cfg.validate();
    spec.validate();
    ds.validate();
    const auto started = Clock::now();

    FoldPlan plan = shared_plan ? *shared_plan : run_fold_plan(cfg, ds);
    Evaluator evaluator(ds, spec, cfg, plan);

    Rng rng = make_rng(derive_seed(cfg.seed, kLoopTag));
    std::vector<Individual> population = initialize_population(cfg);

    RunResult result;
    for (int g = 1; g <= cfg.generations; ++g) {
        evaluate_population(population, evaluator, cfg.jobs);
        result.history.push_back(summarize(population, g));

        const std::vector<std::size_t> pool = select_mating_pool(population);
        if (g == cfg.generations) {
            result.best = population[pool.front()];
            break;
        }

        std::vector<Individual> next;
        next.reserve(cfg.population);
        next.push_back(population[pool.front()]);  // elite, carried unchanged
        const std::size_t m = pool.size();
        for (std::size_t pair_idx = 0; next.size() < static_cast<std::size_t>(cfg.population);
             ++pair_idx) {
            const Individual& p1 = population[pool[(2 * pair_idx) % m]];
            const Individual& p2 = population[pool[(2 * pair_idx + 1) % m]];
            auto [o1, o2] = crossover(p1, p2, cfg.crossover_rate, rng,
                                      static_cast<std::size_t>(cfg.l_max));
            Individual m1 = mutate(o1, cfg.mutation_rate, cfg.catalog, rng);
            Individual m2 = mutate(o2, cfg.mutation_rate, cfg.catalog, rng);
            next.push_back(std::move(m1));
            if (next.size() < static_cast<std::size_t>(cfg.population)) {
                next.push_back(std::move(m2));
            }
        }
        population = std::move(next);
    }

    result.baseline_reports.emplace("no_prep", evaluator.evaluate_no_prep());
    result.wall_time_seconds = seconds_since(started);
    return result;
}

std::vector<Pipeline> enumerate_pipelines(const std::vector<Practice>& catalog,
                                          std::size_t l_max) {
    std::vector<Pipeline> out;
    std::vector<Practice> current;
    std::vector<bool> used(catalog.size(), false);
    const std::size_t depth_cap = std::min(l_max, catalog.size());

    const std::function<void()> extend = [&] {
        if (!current.empty()) {
            Pipeline pl;
            pl.steps = current;
            out.push_back(std::move(pl));
        }
        if (current.size() == depth_cap) return;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            current.push_back(catalog[i]);
            extend();
            current.pop_back();
            used[i] = false;
        }
    };
    extend();
    return out;
}

}  // namespace fate
