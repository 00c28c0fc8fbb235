#pragma once

/// @file random_walk.hpp
/// @brief Stochastic neighborhood refinement of a single candidate.
///
/// The walk decodes a key vector, evaluates it, then takes `nmov` single-dimension
/// moves. Each move starts from the previous candidate whether or not that
/// candidate was accepted; the incumbent is replaced only on strict improvement.
/// The incumbent is re-encoded to keys on exit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/rng.hpp>

namespace hbrkga {

struct WalkConfig {
    std::size_t nmov = 3;
    double epsilon = 0.15;

    void validate() const {
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
            throw UsageError("walk epsilon must be a finite value >= 0");
        }
    }
};

/// The three random draws behind one move.
struct MoveDraw {
    std::size_t dim = 0;
    bool negative = false; ///< Bernoulli(0.5) outcome; true flips the sign
    double magnitude = 0.0;
};

/// Width of the magnitude interval for dimension i. The floor keeps a dimension
/// sitting at zero from freezing.
inline double move_width(const HyperSpace& space, std::size_t i, double value, double epsilon) {
    const auto [lo, hi] = space.bounds(i);
    return std::max(std::abs(value) * (1.0 + epsilon), 0.01 * (hi - lo));
}

/// Apply a fully specified move.
inline HyperVector apply_move(HyperVector gamma, const HyperSpace& space, const MoveDraw& draw) {
    const double sign = draw.negative ? -1.0 : 1.0;
    gamma[draw.dim] = space.round_to(draw.dim, gamma[draw.dim] + sign * draw.magnitude);
    return gamma;
}

inline MoveDraw draw_move(const HyperVector& gamma, const HyperSpace& space, double epsilon,
                          Rng& rng) {
    MoveDraw d;
    d.dim = index_draw(rng, space.size());
    d.negative = bernoulli_draw(rng, 0.5);
    d.magnitude = uniform_draw(rng, 0.0, move_width(space, d.dim, gamma[d.dim], epsilon));
    return d;
}

/// Perturb one uniformly chosen component of gamma.
inline HyperVector movement(const HyperVector& gamma, const HyperSpace& space, double epsilon,
                            Rng& rng) {
    if (gamma.size() != space.size()) {
        throw UsageError("movement: vector length does not match space");
    }
    return apply_move(gamma, space, draw_move(gamma, space, epsilon, rng));
}

struct WalkResult {
    KeyVector keys;
    HyperVector gamma; ///< decoded incumbent
    Score score;
    /// Every evaluation in chain order, 1 + nmov entries.
    std::vector<Evaluation> evaluations;
};

/// Refine `keys` with nmov moves. `first_trial` only labels evaluation errors.
inline WalkResult random_walk(const KeyVector& keys, const WalkConfig& walk,
                              const ObjectiveContract& objective, const HyperSpace& space, Rng& rng,
                              std::size_t first_trial = 0) {
    walk.validate();
    WalkResult out;
    out.evaluations.reserve(walk.nmov + 1);

    HyperVector incumbent = space.decode(keys);
    out.evaluations.push_back(timed_evaluate(objective, incumbent, first_trial));
    Score incumbent_score = out.evaluations.back().score;

    HyperVector current = incumbent;
    for (std::size_t step = 1; step <= walk.nmov; ++step) {
        // Snap onto values a key can represent, so the incumbent survives a
        // round trip through its keys bit for bit.
        current = space.decode(space.encode(movement(current, space, walk.epsilon, rng)));
        out.evaluations.push_back(timed_evaluate(objective, current, first_trial + step));
        const Score s = out.evaluations.back().score;
        if (s < incumbent_score) {
            incumbent = current;
            incumbent_score = s;
        }
    }

    out.keys = space.encode(incumbent);
    out.gamma = std::move(incumbent);
    out.score = incumbent_score;
    return out;
}

} // namespace hbrkga
