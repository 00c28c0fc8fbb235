// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <hbrkga/hbrkga.hpp>

using namespace hbrkga;
namespace ex = hbrkga::experiment;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s -- %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// 5-D box over [-5.12, 5.12]; the listed dimensions are integer over [-5, 5].
HyperSpace rastrigin_space(const std::set<std::size_t>& integer_dims) {
    std::vector<DimensionSpec> dims;
    for (std::size_t i = 0; i < 5; ++i) {
        if (integer_dims.count(i)) {
            dims.push_back({"x" + std::to_string(i), DimKind::integer, -5, 5, {}});
        } else {
            dims.push_back({"x" + std::to_string(i), DimKind::real, -5.12, 5.12, {}});
        }
    }
    return HyperSpace(std::move(dims));
}

BrkgaConfig arm(std::size_t q_ind, std::size_t q_e, std::size_t q_m, std::size_t nmov,
                std::size_t generations) {
    BrkgaConfig c;
    c.q_ind = q_ind;
    c.q_e = q_e;
    c.q_m = q_m;
    c.nmov = nmov;
    c.max_generations = generations;
    return c;
}

std::size_t count_calls(const BrkgaConfig& c) {
    CountingObjective counted(synthetic_objective("sphere", 5));
    (void)run_brkga(c, counted.contract(), rastrigin_space({}));
    return counted.calls();
}

/// Two-sided exact p by enumerating every assignment of pooled ranks to sample a.
double brute_force_p(std::size_t n, std::size_t m, double u_observed) {
    std::vector<bool> pick(n + m, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
    double total = 0, lower = 0, upper = 0;
    do {
        double rank_sum = 0;
        for (std::size_t r = 0; r < pick.size(); ++r) {
            if (pick[r]) rank_sum += static_cast<double>(r + 1);
        }
        const double u = rank_sum - 0.5 * static_cast<double>(n * (n + 1));
        total += 1;
        if (u <= u_observed) lower += 1;
        if (u >= u_observed) upper += 1;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    report(1, "key decoding on the four-dimension figure space", [] {
        const HyperSpace space({{"a", DimKind::integer, 0, 100, {}},
                                {"b", DimKind::real, 0, 3, {}},
                                {"c", DimKind::integer, 0, 50, {}},
                                {"d", DimKind::real, -1, 1, {}}});
        const HyperVector expected{70, 1.5, 30, 0};
        const auto gamma = space.decode(KeyVector{0.7, 0.5, 0.6, 0.5});
        const bool exact = gamma == expected;
        const bool roundtrip = space.decode(space.encode(gamma)) == gamma;
        std::ostringstream d;
        d << "decoded (" << gamma[0] << ", " << gamma[1] << ", " << gamma[2] << ", " << gamma[3]
          << "), roundtrip " << (roundtrip ? "identity" : "differs");
        return Outcome{exact && roundtrip, d.str()};
    });

    report(2, "budget accounting with a counting objective", [] {
        const std::size_t defaults = count_calls(BrkgaConfig{});
        const std::size_t wide = count_calls(arm(24, 8, 4, 0, 10));
        const std::size_t walked = count_calls(arm(10, 3, 2, 3, 6));
        return Outcome{defaults == 240 && wide == 240 && walked == 240,
                       "defaults " + std::to_string(defaults) + ", pop 24 x 10 gens nmov 0 " +
                           std::to_string(wide) + ", pop 10 x 6 gens nmov 3 " +
                           std::to_string(walked) + " (expected 240 each)"};
    });

    report(3, "grid parity for a 2x3x4x5x2 plan", [] {
        const std::vector<std::vector<double>> values{
            {1, 2}, {10, 20, 30}, {0.1, 0.2, 0.3, 0.4}, {-2, -1, 0, 1, 2}, {7, 8}};
        const GridPlan plan(values);
        std::vector<HyperVector> oracle;
        for (double a : values[0])
            for (double b : values[1])
                for (double c : values[2])
                    for (double d : values[3])
                        for (double e : values[4]) oracle.push_back(HyperVector{a, b, c, d, e});
        std::vector<HyperVector> seen;
        CountingObjective counted(ObjectiveContract{"record", 5, [&](const HyperVector&) {
                                                        return Score{0.0};
                                                    }});
        const auto h = grid_search(plan, counted.contract());
        for (const auto& t : h.trials()) seen.push_back(t.gamma);
        const std::set<HyperVector> unique(seen.begin(), seen.end());
        const bool ok = seen == oracle && unique.size() == 240 && counted.calls() == 240;
        return Outcome{ok, std::to_string(seen.size()) + " evaluated, " +
                               std::to_string(unique.size()) + " unique, order " +
                               (seen == oracle ? "matches" : "differs from") + " nested loops"};
    });

    report(4, "random-walk ablation on 5-D Rastrigin (walk vs no walk)", [] {
        const auto space = rastrigin_space({1, 3});
        const auto obj = synthetic_objective("rastrigin", 5);
        std::vector<double> walk_bests, plain_bests;
        double lo = INFINITY, hi = -INFINITY;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            for (auto [cfg, bests] : {std::pair{arm(10, 3, 2, 3, 6), &walk_bests},
                                      std::pair{arm(24, 8, 4, 0, 10), &plain_bests}}) {
                cfg.seed = derive_seed(seed, "ablation", cfg.nmov);
                const auto r = run_brkga(cfg, obj, space);
                bests->push_back(r.best.value);
                for (const auto& t : r.history.trials()) {
                    lo = std::min(lo, t.score.value);
                    hi = std::max(hi, t.score.value);
                }
            }
        }
        const double m3 = mean(walk_bests), m0 = mean(plain_bests);
        const auto test = rank_sum_test(walk_bests, plain_bests);
        return Outcome{m3 <= m0 + 0.01 * (hi - lo),
                       "mean best nmov=3 " + fmt(m3) + ", nmov=0 " + fmt(m0) + ", range " +
                           fmt(hi - lo) + ", rank-sum p " + fmt(test.p_value)};
    });

    report(5, "HBRKGA beats random search at 240 evaluations (sphere, Rastrigin)", [] {
        bool ok = true;
        std::string detail;
        for (const std::string name : {"sphere", "rastrigin"}) {
            const auto space = rastrigin_space(name == "rastrigin" ? std::set<std::size_t>{1, 3}
                                                                   : std::set<std::size_t>{});
            const auto obj = synthetic_objective(name, 5);
            std::vector<double> h, r;
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                BrkgaConfig c;
                c.seed = ex::run_seed(seed, "hbrkga", 0);
                h.push_back(run_brkga(c, obj, space).best.value);
                r.push_back(random_search(space, 240, obj, ex::run_seed(seed, "random", 0)).best().value);
            }
            const double mh = mean(h), mr = mean(r);
            ok = ok && mh <= mr;
            if (!detail.empty()) detail += "; ";
            detail += name + ": hbrkga " + fmt(mh) + " vs random " + fmt(mr) + " (p " +
                      fmt(rank_sum_test(h, r).p_value) + ")";
        }
        return Outcome{ok, detail};
    });

    report(6, "end-to-end MLP tuning reaches macro-F1 >= 0.95", [] {
        const auto data = learner::make_blobs(3, 200, 0.7, 7);
        const auto space = learner::cosmos_space();
        std::size_t hits = 0;
        std::string scores;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            CountingObjective counted(learner::ann_objective(data, space, derive_seed(seed, "ann")));
            BrkgaConfig c = arm(4, 1, 1, 2, 4);
            c.seed = derive_seed(seed, "search");
            const auto r = run_brkga(c, counted.contract(), space);
            const double f1 = -r.best.value;
            if (f1 >= 0.95 && counted.calls() == 48) ++hits;
            scores += fmt(f1) + (seed + 1 < 20 ? " " : "");
        }
        return Outcome{hits >= 18, std::to_string(hits) + "/20 seeds >= 0.95; best F1 per seed: " + scores};
    });

    report(7, "exact rank-sum p-values", [] {
        const auto t = rank_sum_test({1, 2, 3}, {10, 11, 12});
        bool ok = t.exact && std::abs(t.p_value - 0.1) < 1e-15;
        double worst = 0.0;
        std::size_t cases = 0;
        // Every split of the ranks 1..n+m into samples of sizes n and m.
        for (std::size_t n = 3; n <= 7; ++n) {
            for (std::size_t m = 3; n + m <= 10; ++m) {
                std::vector<bool> in_a(n + m, false);
                std::fill(in_a.begin(), in_a.begin() + static_cast<std::ptrdiff_t>(n), true);
                do {
                    std::vector<double> a, b;
                    for (std::size_t r = 0; r < in_a.size(); ++r) {
                        (in_a[r] ? a : b).push_back(static_cast<double>(r + 1));
                    }
                    const auto r = rank_sum_test(a, b);
                    worst = std::max(worst, std::abs(r.p_value - brute_force_p(n, m, r.u_statistic)));
                    ok = ok && r.exact;
                    ++cases;
                } while (std::prev_permutation(in_a.begin(), in_a.end()));
            }
        }
        ok = ok && worst <= 1e-12;
        return Outcome{ok, "p({1,2,3},{10,11,12}) = " + fmt(t.p_value) + "; " + std::to_string(cases) +
                               " tie-free cases, max |exact - enumeration| = " + fmt(worst)};
    });

    report(8, "backprop matches central finite differences", [] {
        Rng rng(2024);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const std::size_t inputs = 2 + index_draw(rng, 3);
            const std::size_t classes = 2 + index_draw(rng, 3);
            const std::array<std::size_t, 3> hidden{1 + index_draw(rng, 5), 1 + index_draw(rng, 5),
                                                    1 + index_draw(rng, 5)};
            auto net = learner::init_params(inputs, hidden, classes, rng);
            for (auto& l : net.layers)
                for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = uniform_draw(rng, -0.5, 0.5);
            learner::Matrix x(8, static_cast<Eigen::Index>(inputs));
            for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = uniform_draw(rng, -2, 2);
            learner::Labels y;
            for (int i = 0; i < 8; ++i) y.push_back(index_draw(rng, classes));
            const double reg = uniform_draw(rng, 0, 0.01);
            const auto analytic = learner::loss_and_grads(net, x, y, reg);
            const double h = 1e-5;
            double diff2 = 0, norm2 = 0;
            auto probe = [&](double& p, double g) {
                const double saved = p;
                p = saved + h;
                const double up = learner::loss_and_grads(net, x, y, reg).loss;
                p = saved - h;
                const double down = learner::loss_and_grads(net, x, y, reg).loss;
                p = saved;
                const double fd = (up - down) / (2 * h);
                diff2 += (fd - g) * (fd - g);
                norm2 += fd * fd + g * g;
            };
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                auto& layer = net.layers[l];
                const auto& g = analytic.grads.layers[l];
                for (Eigen::Index i = 0; i < layer.weights.size(); ++i) probe(layer.weights.data()[i], g.weights.data()[i]);
                for (Eigen::Index i = 0; i < layer.bias.size(); ++i) probe(layer.bias(i), g.bias(i));
            }
            worst = std::max(worst, std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12));
        }
        return Outcome{worst < 1e-5, "50 networks, max relative error " + fmt(worst)};
    });

    report(9, "crossover elite-gene inheritance rate", [] {
        Individual elite, other;
        elite.keys.keys.assign(1000, 1.0);
        other.keys.keys.assign(1000, 0.0);
        Rng rng(derive_seed(0, "crossover-bias"));
        double from_elite = 0;
        for (int i = 0; i < 100; ++i) {
            const auto child = crossover(elite, other, 0.7, rng);
            from_elite += std::accumulate(child.keys.keys.begin(), child.keys.keys.end(), 0.0);
        }
        const double rate = from_elite / 1e5;
        return Outcome{std::abs(rate - 0.7) <= 0.01, "rate " + fmt(rate) + " over 1e5 genes"};
    });

    report(10, "byte-identical trial CSVs across executions and worker counts", [] {
        const fs::path dir = fs::temp_directory_path() / "hbrkga_acceptance_determinism";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "space.txt") << "x0 float -5.12 5.12 -4,4\nx1 int -5 5 -3,0,3\n"
                                            "x2 float -5.12 5.12 -3,-1,1,3\nx3 int -5 5 -4,-2,0,2,4\n"
                                            "x4 float -5.12 5.12 -1,1\n";
        std::ofstream(dir / "ann_space.txt") << "n1 int 5 15\nn2 int 5 30\nn3 int 5 45\n"
                                                "lr float 1e-6 1e-1\nreg float 0 1e-3\n";
        std::ofstream(dir / "synthetic.ini")
            << "[experiment]\nobjective = rastrigin\nspace = space.txt\n"
               "strategies = grid, random, hbrkga, brkga\nbudget = 240\nruns = 3\nseed = 5\n"
               "output = out\nrecord_wall_time = false\n";
        std::ofstream(dir / "ann.ini")
            << "[experiment]\nobjective = ann\nspace = ann_space.txt\nstrategies = random, hbrkga\n"
               "budget = 24\nruns = 2\nseed = 5\noutput = out\nrecord_wall_time = false\n"
               "[hbrkga]\nq_ind = 4\nq_e = 1\nq_m = 1\nnmov = 2\n"
               "[ann]\nper_class = 60\nmax_epochs = 60\n";
        std::size_t compared = 0;
        std::vector<std::string> mismatches;
        for (const char* name : {"synthetic.ini", "ann.ini"}) {
            std::vector<fs::path> outputs;
            for (std::size_t workers : {std::size_t{1}, std::size_t{1}, std::size_t{4}}) {
                auto cfg = ex::load_config(dir / name);
                cfg.workers = workers;
                cfg.output = dir / (std::string(name) + "_out" + std::to_string(outputs.size()));
                std::ostringstream log;
                if (ex::run_experiment(cfg, log).status != ex::ExitCode::success) {
                    return Outcome{false, std::string(name) + " did not complete: " + log.str()};
                }
                outputs.push_back(cfg.output);
            }
            for (const auto& entry : fs::recursive_directory_iterator(outputs[0])) {
                if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
                const auto rel = fs::relative(entry.path(), outputs[0]);
                const auto ref = slurp(entry.path());
                for (std::size_t k = 1; k < outputs.size(); ++k) {
                    ++compared;
                    if (slurp(outputs[k] / rel) != ref) mismatches.push_back(std::string(name) + ":" + rel.string());
                }
            }
        }
        fs::remove_all(dir);
        return Outcome{mismatches.empty() && compared > 0,
                       std::to_string(compared) + " file comparisons (repeat and 1 vs 4 workers), " +
                           std::to_string(mismatches.size()) + " mismatches" +
                           (mismatches.empty() ? "" : " e.g. " + mismatches.front())};
    });

    std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
