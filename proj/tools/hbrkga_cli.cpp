// Command-line front end: run experiments, compare and aggregate trial logs.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hbrkga/experiment.hpp>

namespace ex = hbrkga::experiment;

namespace {

int code(ex::ExitCode c) { return static_cast<int>(c); }

int cmd_validate(const std::string& path) {
    const auto cfg = ex::load_config(path);
    const auto plans = ex::plan_experiment(cfg);
    std::cout << "objective " << cfg.objective << ", " << cfg.space->size() << " dimensions, budget "
              << cfg.budget << ", runs " << cfg.runs << '\n';
    for (const auto& p : plans) {
        std::cout << "  " << p.strategy << ": " << p.evaluations << " evaluations";
        if (p.generations > 0) {
            std::cout << " (" << p.generations << " generations x " << p.brkga.q_ind
                      << " individuals x " << (1 + p.brkga.nmov) << ")";
        }
        if (p.grid_points > 0) std::cout << " (grid)";
        std::cout << '\n';
    }
    return code(ex::ExitCode::success);
}

int cmd_run(const std::string& path, std::size_t workers) {
    auto cfg = ex::load_config(path);
    if (workers > 0) cfg.workers = workers;
    const auto report = ex::run_experiment(cfg);
    for (const auto& s : report.summaries) {
        std::cout << s.strategy << ": mean best " << ex::format_double(s.mean);
        if (s.stddev) std::cout << " (std " << ex::format_double(*s.stddev) << ")";
        std::cout << " over " << s.bests.size() << " runs\n";
    }
    std::cout << "results written to " << cfg.output.string() << '\n';
    return code(report.status);
}

int cmd_compare(const std::string& a, const std::string& b, double alpha) {
    const auto rows_a = ex::load_trials_csv(a);
    const auto rows_b = ex::load_trials_csv(b);
    const auto best_a = ex::final_bests(rows_a);
    const auto best_b = ex::final_bests(rows_b);
    const auto name = [](const std::vector<ex::TrialRow>& rows, const std::string& fallback) {
        return rows.empty() ? fallback : rows.front().strategy;
    };
    const auto t = hbrkga::rank_sum_test(best_a, best_b, alpha);
    std::cout << "strategy_a,strategy_b,p_value,reject\n"
              << name(rows_a, a) << ',' << name(rows_b, b) << ',' << ex::format_double(t.p_value)
              << ',' << (t.reject ? "true" : "false") << '\n';
    return code(ex::ExitCode::success);
}

int cmd_curve(const std::vector<std::string>& paths) {
    std::vector<std::vector<double>> curves;
    for (const auto& p : paths) {
        for (auto& c : ex::curves_by_run(ex::load_trials_csv(p))) curves.push_back(std::move(c));
    }
    const auto mean = hbrkga::mean_curve(curves);
    std::cout << "trial_index,mean_best_so_far\n";
    for (std::size_t i = 0; i < mean.size(); ++i) {
        std::cout << i << ',' << ex::format_double(mean[i]) << '\n';
    }
    return code(ex::ExitCode::success);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperparameter search with HBRKGA, BRKGA, grid and random search"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t workers = 0;
    auto* run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", config_path, "Experiment config file")->required();
    run->add_option("-w,--workers", workers, "Worker threads (overrides the config)");

    std::string log_a, log_b;
    double alpha = 0.05;
    auto* compare = app.add_subcommand("compare", "Rank-sum test between two trial logs");
    compare->add_option("runlog_a", log_a, "Trial CSV")->required();
    compare->add_option("runlog_b", log_b, "Trial CSV")->required();
    compare->add_option("--alpha", alpha, "Significance level")->capture_default_str();

    std::vector<std::string> curve_logs;
    auto* curve = app.add_subcommand("curve", "Mean best-so-far curve over trial logs");
    curve->add_option("runlogs", curve_logs, "Trial CSVs")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config and print the effective plans");
    validate->add_option("config", validate_path, "Experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(ex::ExitCode::config_error);
    }

    try {
        if (*run) return cmd_run(config_path, workers);
        if (*compare) return cmd_compare(log_a, log_b, alpha);
        if (*curve) return cmd_curve(curve_logs);
        if (*validate) return cmd_validate(validate_path);
    } catch (const hbrkga::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return code(ex::ExitCode::config_error);
    } catch (const hbrkga::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code(ex::ExitCode::config_error);
    } catch (const hbrkga::EvaluationError& e) {
        std::cerr << "evaluation failure: " << e.what() << '\n';
        return code(ex::ExitCode::evaluation_failure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code(ex::ExitCode::evaluation_failure);
    }
    return code(ex::ExitCode::success);
}
