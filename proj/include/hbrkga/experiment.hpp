#pragma once

/// @file experiment.hpp
/// @brief Experiment orchestration: config and space files, budget mapping,
/// multi-run execution and CSV / JSON-lines result files.
///
/// Config file: `key = value` lines grouped under `[section]` headers, `#`
/// starts a comment. Sections: experiment, hbrkga, brkga, ann. Example:
///
///     [experiment]
///     objective  = rastrigin        # sphere | rastrigin | rosenbrock | ann
///     space      = space.txt        # relative to the config file
///     strategies = random, hbrkga   # grid | random | brkga | hbrkga
///     budget     = 240
///     runs       = 10
///     seed       = 42
///     output     = results
///
/// Space file: one dimension per line, `name kind min max [grid]`, where kind
/// is int or float and grid is an optional comma-separated value list.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include <hbrkga/baselines.hpp>
#include <hbrkga/brkga.hpp>
#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/learner.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/parallel.hpp>
#include <hbrkga/rng.hpp>
#include <hbrkga/stats.hpp>

namespace hbrkga::experiment {

namespace fs = std::filesystem;

enum class ExitCode : int { success = 0, config_error = 1, evaluation_failure = 2 };

// ---------------------------------------------------------------------------
// Text helpers

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

} // namespace detail

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Space file

inline HyperSpace parse_space(std::istream& in) {
    std::vector<DimensionSpec> dims;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string name, kind, lo, hi, grid, extra;
        ss >> name >> kind >> lo >> hi;
        if (hi.empty()) {
            throw ConfigError("expected: name kind min max [grid]", line_no);
        }
        ss >> grid >> extra;
        if (!extra.empty()) {
            throw ConfigError("unexpected trailing field '" + extra + "'", line_no);
        }
        DimensionSpec d;
        d.name = name;
        if (kind == "int") {
            d.kind = DimKind::integer;
        } else if (kind == "float") {
            d.kind = DimKind::real;
        } else {
            throw ConfigError("kind must be int or float, got '" + kind + "'", line_no);
        }
        const auto min = detail::parse_double(lo);
        const auto max = detail::parse_double(hi);
        if (!min || !max) {
            throw ConfigError("min and max must be numbers", line_no);
        }
        d.min = *min;
        d.max = *max;
        if (!grid.empty()) {
            for (const auto& cell : detail::split(grid, ',')) {
                const auto v = detail::parse_double(cell);
                if (!v) throw ConfigError("bad grid value '" + cell + "'", line_no);
                d.grid_values.push_back(*v);
            }
        }
        try {
            d.validate();
        } catch (const UsageError& e) {
            throw ConfigError(e.what(), line_no);
        }
        dims.push_back(std::move(d));
    }
    try {
        return HyperSpace(std::move(dims));
    } catch (const UsageError& e) {
        throw ConfigError(e.what());
    }
}

inline HyperSpace load_space(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open space file " + path.string());
    return parse_space(in);
}

inline void write_space(std::ostream& out, const HyperSpace& space) {
    for (const auto& d : space.dims()) {
        out << d.name << ' ' << to_string(d.kind) << ' ' << format_double(d.min) << ' '
            << format_double(d.max);
        for (std::size_t k = 0; k < d.grid_values.size(); ++k) {
            out << (k == 0 ? ' ' : ',') << format_double(d.grid_values[k]);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Experiment config

struct AnnSettings {
    std::size_t classes = 3;
    std::size_t per_class = 200;
    double spread = 0.7;
    std::uint64_t data_seed = 7;
    std::string dataset_file; ///< optional CSV; overrides the generated blobs
    std::size_t max_epochs = 300;
    std::size_t patience = 13;
};

struct ExperimentConfig {
    std::string objective = "sphere";
    std::optional<HyperSpace> space;
    std::vector<std::string> strategies;
    std::size_t budget = 240;
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    fs::path output = "results";
    std::size_t workers = default_workers();
    double alpha = 0.05;
    bool record_wall_time = true;
    BrkgaConfig hbrkga;
    BrkgaConfig brkga;
    AnnSettings ann;

    ExperimentConfig() {
        brkga.q_ind = 24;
        brkga.q_e = 8;
        brkga.q_m = 4;
        brkga.nmov = 0;
        brkga.label = "brkga";
    }
};

inline bool is_known_strategy(const std::string& s) {
    return s == "grid" || s == "random" || s == "brkga" || s == "hbrkga";
}

/// Parse a config. Relative paths resolve against `base_dir`.
inline ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir = ".") {
    ExperimentConfig cfg;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    std::optional<std::pair<std::string, std::size_t>> space_entry;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "experiment" && section != "hbrkga" && section != "brkga" &&
                section != "ann") {
                throw ConfigError("unknown section [" + section + "]", line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
        if (!seen.emplace(section + "." + key, line_no).second) {
            throw ConfigError("duplicate key '" + key + "'", line_no);
        }

        auto as_uint = [&]() -> std::uint64_t {
            const auto v = detail::parse_uint(value);
            if (!v) throw ConfigError("'" + key + "' must be a non-negative integer", line_no);
            return *v;
        };
        auto as_double = [&]() -> double {
            const auto v = detail::parse_double(value);
            if (!v) throw ConfigError("'" + key + "' must be a number", line_no);
            return *v;
        };
        auto as_bool = [&]() -> bool {
            if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
            if (value == "false" || value == "0" || value == "no" || value == "off") return false;
            throw ConfigError("'" + key + "' must be true or false", line_no);
        };
        auto unknown = [&] { throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no); };

        if (section == "experiment") {
            if (key == "objective") {
                cfg.objective = value;
                if (value != "sphere" && value != "rastrigin" && value != "rosenbrock" &&
                    value != "ann") {
                    throw ConfigError("unknown objective '" + value + "'", line_no);
                }
            } else if (key == "space") {
                space_entry = {value, line_no};
            } else if (key == "strategies") {
                cfg.strategies.clear();
                for (const auto& s : detail::split(value, ',')) {
                    if (!is_known_strategy(s)) {
                        throw ConfigError("unknown strategy '" + s + "'", line_no);
                    }
                    if (std::find(cfg.strategies.begin(), cfg.strategies.end(), s) !=
                        cfg.strategies.end()) {
                        throw ConfigError("strategy '" + s + "' listed twice", line_no);
                    }
                    cfg.strategies.push_back(s);
                }
            } else if (key == "budget") {
                cfg.budget = as_uint();
                if (cfg.budget < 1) throw ConfigError("budget must be >= 1", line_no);
            } else if (key == "runs") {
                cfg.runs = as_uint();
                if (cfg.runs < 1) throw ConfigError("runs must be >= 1", line_no);
            } else if (key == "seed") {
                cfg.seed = as_uint();
            } else if (key == "output") {
                cfg.output = base_dir / value;
            } else if (key == "workers") {
                cfg.workers = std::max<std::uint64_t>(1, as_uint());
            } else if (key == "alpha") {
                cfg.alpha = as_double();
                if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
                    throw ConfigError("alpha must lie in (0, 1)", line_no);
                }
            } else if (key == "record_wall_time") {
                cfg.record_wall_time = as_bool();
            } else {
                unknown();
            }
        } else if (section == "hbrkga" || section == "brkga") {
            BrkgaConfig& b = section == "hbrkga" ? cfg.hbrkga : cfg.brkga;
            if (key == "q_ind") b.q_ind = as_uint();
            else if (key == "q_e") b.q_e = as_uint();
            else if (key == "q_m") b.q_m = as_uint();
            else if (key == "phi_a") b.phi_a = as_double();
            else if (key == "nmov") {
                b.nmov = as_uint();
                if (section == "brkga" && b.nmov != 0) {
                    throw ConfigError("brkga is the walk-free variant; nmov must be 0", line_no);
                }
            }
            else if (key == "epsilon") b.epsilon = as_double();
            else unknown();
        } else if (section == "ann") {
            if (key == "classes") cfg.ann.classes = as_uint();
            else if (key == "per_class") cfg.ann.per_class = as_uint();
            else if (key == "spread") cfg.ann.spread = as_double();
            else if (key == "data_seed") cfg.ann.data_seed = as_uint();
            else if (key == "dataset") cfg.ann.dataset_file = (base_dir / value).string();
            else if (key == "max_epochs") cfg.ann.max_epochs = as_uint();
            else if (key == "patience") cfg.ann.patience = as_uint();
            else unknown();
        }
    }

    if (cfg.strategies.empty()) throw ConfigError("no strategies configured");
    if (!space_entry) throw ConfigError("missing 'space' in [experiment]");
    try {
        cfg.space = load_space(base_dir / space_entry->first);
    } catch (const ConfigError& e) {
        throw ConfigError(space_entry->first + ": " + e.what(), space_entry->second);
    }
    for (const char* name : {"hbrkga", "brkga"}) {
        const BrkgaConfig& b = std::string(name) == "hbrkga" ? cfg.hbrkga : cfg.brkga;
        try {
            b.validate();
        } catch (const UsageError& e) {
            throw ConfigError(std::string("[") + name + "] " + e.what(),
                              seen.count(std::string(name) + ".q_ind") ? seen[std::string(name) + ".q_ind"] : 0);
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------
// Budget mapping

struct EffectivePlan {
    std::string strategy;
    std::size_t evaluations = 0; ///< objective calls the plan will make
    std::size_t generations = 0; ///< brkga / hbrkga only
    std::size_t grid_points = 0; ///< grid only
    BrkgaConfig brkga;           ///< brkga / hbrkga only
};

/// Translate a budget into a concrete plan. `grid` is needed for the grid strategy.
inline EffectivePlan strategy_budget_map(const std::string& strategy, std::size_t budget,
                                         const BrkgaConfig& brkga_config,
                                         const std::optional<GridPlan>& grid = std::nullopt) {
    if (budget < 1) throw UsageError("budget must be >= 1");
    EffectivePlan plan;
    plan.strategy = strategy;
    if (strategy == "grid") {
        if (!grid) throw UsageError("grid strategy needs grid values for every dimension");
        plan.grid_points = grid->combinations();
        if (plan.grid_points > budget) {
            throw UsageError("grid has " + std::to_string(plan.grid_points) +
                             " combinations, more than the budget of " + std::to_string(budget));
        }
        plan.evaluations = plan.grid_points;
    } else if (strategy == "random") {
        plan.evaluations = budget;
    } else if (strategy == "hbrkga" || strategy == "brkga") {
        BrkgaConfig b = brkga_config;
        if (strategy == "brkga") b.nmov = 0;
        b.label = strategy;
        b.validate();
        const std::size_t per_generation = b.q_ind * (1 + b.nmov);
        if (budget % per_generation != 0) {
            throw UsageError("budget " + std::to_string(budget) + " is not a multiple of " +
                             std::to_string(per_generation) + " evaluations per generation (remainder " +
                             std::to_string(budget % per_generation) + ")");
        }
        b.max_generations = budget / per_generation;
        plan.generations = b.max_generations;
        plan.evaluations = budget;
        plan.brkga = b;
    } else {
        throw UsageError("unknown strategy '" + strategy + "'");
    }
    return plan;
}

inline std::uint64_t run_seed(std::uint64_t master, const std::string& strategy, std::size_t run) {
    return derive_seed(master, strategy, static_cast<std::uint64_t>(run));
}

// ---------------------------------------------------------------------------
// Trial logs

struct TrialRow {
    std::string strategy;
    std::size_t run = 0;
    std::size_t trial_index = 0;
    std::vector<double> gamma;
    double score = 0.0;
    double best_so_far = 0.0;
    double wall_time_s = 0.0;

    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

inline std::vector<TrialRow> to_rows(const RunHistory& history, std::size_t run,
                                     bool record_wall_time = true) {
    std::vector<TrialRow> rows;
    rows.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& t = history.trials()[i];
        rows.push_back(TrialRow{t.strategy, run, t.trial_index, t.gamma.values, t.score.value,
                                history.best_so_far()[i].value,
                                record_wall_time ? t.wall_time : 0.0});
    }
    return rows;
}

inline void write_trial_header(std::ostream& out, std::size_t dims) {
    out << "strategy,run,trial_index";
    for (std::size_t i = 0; i < dims; ++i) out << ",dim_" << i;
    out << ",score,best_so_far,wall_time_s\n";
}

inline void write_trial_row(std::ostream& out, const TrialRow& r) {
    out << r.strategy << ',' << r.run << ',' << r.trial_index;
    for (double v : r.gamma) out << ',' << format_double(v);
    out << ',' << format_double(r.score) << ',' << format_double(r.best_so_far) << ','
        << format_double(r.wall_time_s) << '\n';
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows, std::size_t dims) {
    write_trial_header(out, dims);
    for (const auto& r : rows) write_trial_row(out, r);
}

inline void write_trials_jsonl(std::ostream& out, const std::vector<TrialRow>& rows) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["strategy"] = r.strategy;
        j["run"] = r.run;
        j["trial_index"] = r.trial_index;
        j["gamma"] = r.gamma;
        j["score"] = r.score;
        j["best_so_far"] = r.best_so_far;
        j["wall_time_s"] = r.wall_time_s;
        out << j.dump() << '\n';
    }
}

/// Parse a trial CSV written by write_trials_csv.
inline std::vector<TrialRow> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty trial log");
    const auto header = detail::split(detail::trim(line), ',');
    if (header.size() < 7 || header[0] != "strategy" || header[1] != "run" ||
        header[2] != "trial_index" || header[header.size() - 3] != "score" ||
        header[header.size() - 2] != "best_so_far" || header.back() != "wall_time_s") {
        throw ConfigError("not a trial log header", 1);
    }
    const std::size_t dims = header.size() - 6;
    std::vector<TrialRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto cells = detail::split(line, ',');
        if (cells.size() != header.size()) throw ConfigError("wrong number of columns", line_no);
        TrialRow r;
        r.strategy = cells[0];
        const auto run = detail::parse_uint(cells[1]);
        const auto idx = detail::parse_uint(cells[2]);
        if (!run || !idx) throw ConfigError("bad run or trial_index", line_no);
        r.run = *run;
        r.trial_index = *idx;
        std::vector<double> nums;
        for (std::size_t c = 3; c < cells.size(); ++c) {
            const auto v = detail::parse_double(cells[c]);
            if (!v) throw ConfigError("bad number '" + cells[c] + "'", line_no);
            nums.push_back(*v);
        }
        r.gamma.assign(nums.begin(), nums.begin() + static_cast<std::ptrdiff_t>(dims));
        r.score = nums[dims];
        r.best_so_far = nums[dims + 1];
        r.wall_time_s = nums[dims + 2];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<TrialRow> load_trials_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trial log " + path.string());
    try {
        return read_trials_csv(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Best-so-far curve per (strategy, run), keyed in first-appearance order.
inline std::vector<std::vector<double>> curves_by_run(const std::vector<TrialRow>& rows) {
    std::vector<std::pair<std::string, std::size_t>> keys;
    std::vector<std::vector<double>> curves;
    for (const auto& r : rows) {
        const std::pair<std::string, std::size_t> key{r.strategy, r.run};
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
            keys.push_back(key);
            curves.emplace_back();
            it = keys.end() - 1;
        }
        curves[static_cast<std::size_t>(it - keys.begin())].push_back(r.best_so_far);
    }
    return curves;
}

inline std::vector<double> final_bests(const std::vector<TrialRow>& rows) {
    std::vector<double> out;
    for (const auto& c : curves_by_run(rows)) out.push_back(c.back());
    return out;
}

// ---------------------------------------------------------------------------
// Running

/// Objective for the configured experiment.
inline ObjectiveContract make_objective(const ExperimentConfig& cfg) {
    const HyperSpace& space = *cfg.space;
    if (cfg.objective == "ann") {
        learner::Dataset data =
            cfg.ann.dataset_file.empty()
                ? learner::make_blobs(cfg.ann.classes, cfg.ann.per_class, cfg.ann.spread,
                                      cfg.ann.data_seed)
                : learner::load_dataset_csv(cfg.ann.dataset_file);
        return learner::ann_objective(std::move(data), space, derive_seed(cfg.seed, "ann"),
                                      cfg.ann.max_epochs, cfg.ann.patience);
    }
    return synthetic_objective(cfg.objective, space.size());
}

/// Build every strategy's plan; throws UsageError for budget mismatches.
inline std::vector<EffectivePlan> plan_experiment(const ExperimentConfig& cfg) {
    std::optional<GridPlan> grid;
    const bool any_grid =
        std::find(cfg.strategies.begin(), cfg.strategies.end(), "grid") != cfg.strategies.end();
    if (any_grid) grid = GridPlan::from_space(*cfg.space);
    std::vector<EffectivePlan> plans;
    for (const auto& s : cfg.strategies) {
        plans.push_back(strategy_budget_map(s, cfg.budget, s == "brkga" ? cfg.brkga : cfg.hbrkga, grid));
    }
    return plans;
}

/// Execute one run of a plan.
inline RunHistory execute_plan(const EffectivePlan& plan, const HyperSpace& space,
                               const ObjectiveContract& objective, std::uint64_t seed,
                               std::size_t workers) {
    if (plan.strategy == "grid") {
        return grid_search(GridPlan::from_space(space), objective, workers, "grid");
    }
    if (plan.strategy == "random") {
        return random_search(space, plan.evaluations, objective, seed, workers, "random");
    }
    BrkgaConfig b = plan.brkga;
    b.seed = seed;
    b.workers = workers;
    return run_brkga(b, objective, space).history;
}

struct RunOutcome {
    std::string strategy;
    std::size_t run = 0;
    RunHistory history;
    std::optional<std::string> error;
    std::optional<std::size_t> failed_trial;
};

struct ExperimentReport {
    std::vector<RunOutcome> runs;
    std::vector<RunSummary> summaries;
    ExitCode status = ExitCode::success;
};

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

/// Run every strategy `runs` times and write results under cfg.output:
///   runs/<strategy>_run<k>.csv and .jsonl  per-run trial logs
///   <strategy>_trials.csv                  all runs of a strategy
///   summary.csv                            mean / std of final bests
///   comparison.csv                         pairwise rank-sum tests
///   curve_<strategy>.csv                   mean best-so-far curve
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
    const auto plans = plan_experiment(cfg);
    const HyperSpace& space = *cfg.space;
    const ObjectiveContract objective = make_objective(cfg);
    const std::size_t dims = space.size();

    fs::create_directories(cfg.output / "runs");
    ExperimentReport report;

    std::vector<std::vector<RunHistory>> completed(plans.size());
    for (std::size_t p = 0; p < plans.size(); ++p) {
        const auto& plan = plans[p];
        std::ostringstream all_csv;
        write_trial_header(all_csv, dims);
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            RunOutcome outcome{plan.strategy, r, {}, std::nullopt, std::nullopt};
            CountingObjective counted(objective);
            try {
                outcome.history = execute_plan(plan, space, counted.contract(),
                                               run_seed(cfg.seed, plan.strategy, r), cfg.workers);
                if (counted.calls() > cfg.budget || outcome.history.size() != counted.calls()) {
                    throw std::logic_error("objective call count does not match the plan");
                }
                completed[p].push_back(outcome.history);
            } catch (const EvaluationError& e) {
                outcome.error = e.what();
                outcome.failed_trial = e.trial_index();
                report.status = ExitCode::evaluation_failure;
                log << plan.strategy << " run " << r << " aborted: " << e.what() << '\n';
            }

            const auto rows = to_rows(outcome.history, r, cfg.record_wall_time);
            std::ostringstream csv;
            write_trials_csv(csv, rows, dims);
            std::ostringstream jsonl;
            write_trials_jsonl(jsonl, rows);
            const std::string stem = plan.strategy + "_run" + std::to_string(r);
            write_file(cfg.output / "runs" / (stem + ".csv"), csv.str());
            write_file(cfg.output / "runs" / (stem + ".jsonl"), jsonl.str());
            for (const auto& row : rows) write_trial_row(all_csv, row);
            report.runs.push_back(std::move(outcome));
        }
        write_file(cfg.output / (plan.strategy + "_trials.csv"), all_csv.str());
    }

    std::ostringstream summary;
    summary << "strategy,runs,completed,mean_best,std_best,min_best\n";
    for (std::size_t p = 0; p < plans.size(); ++p) {
        summary << plans[p].strategy << ',' << cfg.runs << ',' << completed[p].size();
        if (completed[p].empty()) {
            summary << ",,,\n";
            continue;
        }
        auto s = summarize(plans[p].strategy, completed[p]);
        summary << ',' << format_double(s.mean) << ','
                << (s.stddev ? format_double(*s.stddev) : std::string{}) << ','
                << format_double(*std::min_element(s.bests.begin(), s.bests.end())) << '\n';
        report.summaries.push_back(std::move(s));

        std::ostringstream curve;
        curve << "trial_index,mean_best_so_far\n";
        const auto mc = mean_curve(completed[p]);
        for (std::size_t i = 0; i < mc.size(); ++i) {
            curve << i << ',' << format_double(mc[i]) << '\n';
        }
        write_file(cfg.output / ("curve_" + plans[p].strategy + ".csv"), curve.str());
    }
    write_file(cfg.output / "summary.csv", summary.str());

    std::ostringstream comparison;
    comparison << "strategy_a,strategy_b,p_value,reject\n";
    for (std::size_t a = 0; a < plans.size(); ++a) {
        for (std::size_t b = a + 1; b < plans.size(); ++b) {
            if (completed[a].size() < 3 || completed[b].size() < 3) {
                log << "skipping " << plans[a].strategy << " vs " << plans[b].strategy
                    << ": rank-sum test needs at least 3 completed runs each\n";
                continue;
            }
            std::vector<double> xa, xb;
            for (const auto& h : completed[a]) xa.push_back(h.best().value);
            for (const auto& h : completed[b]) xb.push_back(h.best().value);
            const auto t = rank_sum_test(xa, xb, cfg.alpha);
            comparison << plans[a].strategy << ',' << plans[b].strategy << ','
                       << format_double(t.p_value) << ',' << (t.reject ? "true" : "false") << '\n';
        }
    }
    write_file(cfg.output / "comparison.csv", comparison.str());

    if (report.status == ExitCode::evaluation_failure) {
        nlohmann::json quote;
        std::ostringstream errors;
        errors << "strategy,run,trial_index,message\n";
        for (const auto& o : report.runs) {
            if (!o.error) continue;
            quote = *o.error;
            errors << o.strategy << ',' << o.run << ',' << *o.failed_trial << ',' << quote.dump()
                   << '\n';
        }
        write_file(cfg.output / "errors.csv", errors.str());
    }
    return report;
}

} // namespace hbrkga::experiment
