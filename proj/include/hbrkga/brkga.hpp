#pragma once

/// @file brkga.hpp
/// @brief Biased random-key genetic algorithm with a per-individual refinement hook.
///
/// One generation:
///   1. refine (random walk) and score every member,
///   2. sort by score; the best q_e form the elite set,
///   3. next population = elite + q_m fresh mutants + offspring, where each
///      offspring takes every gene from a random elite parent with probability
///      phi_a and from a random non-elite parent otherwise.
///
/// With nmov = 0 the refinement degenerates to a single evaluation and the
/// procedure is a plain BRKGA.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/parallel.hpp>
#include <hbrkga/random_walk.hpp>
#include <hbrkga/rng.hpp>

namespace hbrkga {

/// Defaults: 10 generations of
/// 6 individuals, 2 elite, 1 mutant, phi_a 0.7, 3 walk steps, 15% perturbation.
struct BrkgaConfig {
    std::size_t q_ind = 6;
    std::size_t q_e = 2;
    std::size_t q_m = 1;
    double phi_a = 0.7;
    std::size_t nmov = 3;
    double epsilon = 0.15;
    std::size_t max_generations = 10;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string label = "hbrkga";

    void validate() const {
        if (q_e < 1) {
            throw UsageError("q_e must be at least 1");
        }
        if (q_e + q_m > q_ind) {
            throw UsageError("q_e + q_m must not exceed q_ind");
        }
        if (!(q_e < q_ind - q_e)) {
            throw UsageError("elite set must be strictly smaller than the non-elite set");
        }
        if (!(phi_a > 0.5 && phi_a <= 1.0)) {
            throw UsageError("phi_a must lie in (0.5, 1]");
        }
        WalkConfig{nmov, epsilon}.validate();
    }

    [[nodiscard]] WalkConfig walk() const { return WalkConfig{nmov, epsilon}; }

    /// Objective calls for a full run.
    [[nodiscard]] std::size_t evaluations() const noexcept {
        return max_generations * q_ind * (1 + nmov);
    }
};

struct Individual {
    KeyVector keys;
    std::optional<Score> score;
    std::optional<HyperVector> gamma; ///< decoded incumbent, set together with score
};

using Population = std::vector<Individual>;

inline KeyVector random_keys(std::size_t n, Rng& rng) {
    KeyVector k;
    k.keys.resize(n);
    for (auto& v : k.keys) {
        v = unit_draw(rng);
    }
    return k;
}

/// q_ind individuals of n uniform keys, unscored.
inline Population init_population(const BrkgaConfig& config, std::size_t n, Rng& rng) {
    config.validate();
    if (n == 0) {
        throw UsageError("init_population: zero dimensions");
    }
    Population pop(config.q_ind);
    for (auto& ind : pop) {
        ind.keys = random_keys(n, rng);
    }
    return pop;
}

struct Partition {
    Population elite;
    Population non_elite;
};

/// Stable sort by ascending score; the first q_e are the elite.
inline Partition partition(const Population& pop, std::size_t q_e) {
    for (const auto& ind : pop) {
        if (!ind.score) {
            throw UsageError("partition: individual without score");
        }
    }
    if (q_e > pop.size()) {
        throw UsageError("partition: q_e larger than population");
    }
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return *pop[a].score < *pop[b].score; });
    Partition out;
    out.elite.reserve(q_e);
    out.non_elite.reserve(pop.size() - q_e);
    for (std::size_t r = 0; r < order.size(); ++r) {
        (r < q_e ? out.elite : out.non_elite).push_back(pop[order[r]]);
    }
    return out;
}

inline Population make_mutants(std::size_t q_m, std::size_t n, Rng& rng) {
    Population out(q_m);
    for (auto& ind : out) {
        ind.keys = random_keys(n, rng);
    }
    return out;
}

/// Per-gene selection given explicit draws: draw j true takes a[j], false takes b[j].
inline Individual crossover(const Individual& a, const Individual& b,
                            const std::vector<bool>& draws) {
    if (a.keys.size() != b.keys.size() || draws.size() != a.keys.size()) {
        throw UsageError("crossover: parent key lengths differ");
    }
    Individual child;
    child.keys.keys.resize(a.keys.size());
    for (std::size_t j = 0; j < a.keys.size(); ++j) {
        child.keys[j] = draws[j] ? a.keys[j] : b.keys[j];
    }
    return child;
}

/// Biased parameterized-uniform crossover; a is the elite parent.
inline Individual crossover(const Individual& a, const Individual& b, double phi_a, Rng& rng) {
    if (a.keys.size() != b.keys.size()) {
        throw UsageError("crossover: parent key lengths differ");
    }
    std::vector<bool> draws(a.keys.size());
    for (std::size_t j = 0; j < draws.size(); ++j) {
        draws[j] = bernoulli_draw(rng, phi_a);
    }
    return crossover(a, b, draws);
}

struct GenerationResult {
    Population next;
    Individual best;
    /// Evaluations per member, in member order.
    std::vector<std::vector<Evaluation>> evaluations;
};

/// Refines every member with `refine(keys, rng, member) -> WalkResult`, then
/// builds the next population. All randomness comes from streams derived from
/// generation_seed, so the result does not depend on `workers`.
template <class Refine>
GenerationResult step_generation(const Population& pop, const BrkgaConfig& config, Refine&& refine,
                                 std::uint64_t generation_seed, std::size_t workers = 1) {
    config.validate();
    if (pop.size() != config.q_ind) {
        throw UsageError("step_generation: population size differs from q_ind");
    }
    const std::size_t n = pop.front().keys.size();

    Population walked(pop.size());
    std::vector<std::vector<Evaluation>> evaluations(pop.size());
    parallel_for(pop.size(), workers, [&](std::size_t i) {
        Rng walk_rng = make_stream(generation_seed, "walk", i);
        WalkResult r = refine(pop[i].keys, walk_rng, i);
        walked[i] = Individual{std::move(r.keys), r.score, std::move(r.gamma)};
        evaluations[i] = std::move(r.evaluations);
    });

    Partition parts = partition(walked, config.q_e);

    GenerationResult out;
    out.best = parts.elite.front();
    out.evaluations = std::move(evaluations);
    out.next.reserve(config.q_ind);
    for (const auto& e : parts.elite) {
        out.next.push_back(e);
    }

    Rng mutant_rng = make_stream(generation_seed, "mutants");
    for (auto& m : make_mutants(config.q_m, n, mutant_rng)) {
        out.next.push_back(std::move(m));
    }

    Rng cross_rng = make_stream(generation_seed, "crossover");
    const std::size_t offspring = config.q_ind - config.q_e - config.q_m;
    for (std::size_t k = 0; k < offspring; ++k) {
        const auto& a = parts.elite[index_draw(cross_rng, parts.elite.size())];
        const auto& b = parts.non_elite[index_draw(cross_rng, parts.non_elite.size())];
        out.next.push_back(crossover(a, b, config.phi_a, cross_rng));
    }
    return out;
}

struct BrkgaResult {
    HyperVector gamma_star;
    Score best;
    RunHistory history;
    /// Best score of each generation.
    std::vector<Score> generation_best;
};

/// Full run: max_generations generations, random-walk refinement of every member.
inline BrkgaResult run_brkga(const BrkgaConfig& config, const ObjectiveContract& objective,
                             const HyperSpace& space) {
    config.validate();
    if (config.max_generations == 0) {
        throw UsageError("run_brkga: max_generations is zero");
    }
    if (objective.n_dims != space.size()) {
        throw UsageError("run_brkga: objective and space dimension counts differ");
    }

    const WalkConfig walk = config.walk();
    Rng init_rng = make_stream(config.seed, "init");
    Population pop = init_population(config, space.size(), init_rng);

    BrkgaResult out;
    out.best = Score{std::numeric_limits<double>::infinity()};
    for (std::size_t g = 0; g < config.max_generations; ++g) {
        const std::size_t first_trial = out.history.size();
        auto refine = [&](const KeyVector& keys, Rng& rng, std::size_t member) {
            return random_walk(keys, walk, objective, space, rng,
                               first_trial + member * (1 + walk.nmov));
        };
        GenerationResult gen = step_generation(pop, config, refine,
                                               derive_seed(config.seed, "generation", g),
                                               config.workers);
        for (auto& member_evals : gen.evaluations) {
            for (auto& e : member_evals) {
                append_evaluation(out.history, config.label, std::move(e));
            }
        }
        out.generation_best.push_back(*gen.best.score);
        if (*gen.best.score < out.best) {
            out.best = *gen.best.score;
            out.gamma_star = *gen.best.gamma;
        }
        pop = std::move(gen.next);
    }
    return out;
}

} // namespace hbrkga
