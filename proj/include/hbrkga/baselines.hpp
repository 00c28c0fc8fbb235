#pragma once

/// @file baselines.hpp
/// @brief Grid Search and Random Search under the same objective contract.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/parallel.hpp>
#include <hbrkga/rng.hpp>

namespace hbrkga {

/// Explicit value lists per dimension; the search covers their Cartesian product.
class GridPlan {
  public:
    explicit GridPlan(std::vector<std::vector<double>> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw UsageError("grid plan has no dimensions");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i].empty()) {
                throw UsageError("grid plan dimension " + std::to_string(i) + " has no values");
            }
        }
    }

    /// Plan from the grid_values of every dimension in the space.
    static GridPlan from_space(const HyperSpace& space) {
        std::vector<std::vector<double>> values;
        for (const auto& d : space.dims()) {
            if (d.grid_values.empty()) {
                throw UsageError("dimension '" + d.name + "' has no grid values");
            }
            values.push_back(d.grid_values);
        }
        return GridPlan(std::move(values));
    }

    [[nodiscard]] std::size_t dims() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values(std::size_t i) const { return values_.at(i); }

    [[nodiscard]] std::size_t combinations() const noexcept {
        std::size_t total = 1;
        for (const auto& v : values_) {
            total *= v.size();
        }
        return total;
    }

    /// The k-th combination in lexicographic order, last dimension fastest.
    [[nodiscard]] HyperVector at(std::size_t k) const {
        if (k >= combinations()) {
            throw UsageError("grid index out of range");
        }
        HyperVector out;
        out.values.resize(values_.size());
        for (std::size_t i = values_.size(); i-- > 0;) {
            const auto& v = values_[i];
            out[i] = v[k % v.size()];
            k /= v.size();
        }
        return out;
    }

  private:
    std::vector<std::vector<double>> values_;
};

inline RunHistory collect_history(const std::string& strategy, std::vector<Evaluation> evals) {
    RunHistory h;
    for (auto& e : evals) {
        append_evaluation(h, strategy, std::move(e));
    }
    return h;
}

/// Evaluate every grid combination once, in plan order.
inline RunHistory grid_search(const GridPlan& plan, const ObjectiveContract& objective,
                              std::size_t workers = 1, const std::string& label = "grid") {
    if (objective.n_dims != plan.dims()) {
        throw UsageError("grid_search: plan and objective dimension counts differ");
    }
    std::vector<Evaluation> evals(plan.combinations());
    parallel_for(evals.size(), workers,
                 [&](std::size_t k) { evals[k] = timed_evaluate(objective, plan.at(k), k); });
    return collect_history(label, std::move(evals));
}

/// One point drawn uniformly from the box, before type rounding.
inline HyperVector draw_raw_sample(const HyperSpace& space, Rng& rng) {
    HyperVector out;
    out.values.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto [lo, hi] = space.bounds(i);
        out[i] = uniform_draw(rng, lo, hi);
    }
    return out;
}

inline HyperVector draw_sample(const HyperSpace& space, Rng& rng) {
    HyperVector out = draw_raw_sample(space, rng);
    for (std::size_t i = 0; i < space.size(); ++i) {
        out[i] = space.round_to(i, out[i]);
    }
    return out;
}

/// `budget` independent uniform samples. Sample k uses its own stream, so the
/// history does not depend on `workers`.
inline RunHistory random_search(const HyperSpace& space, std::size_t budget,
                                const ObjectiveContract& objective, std::uint64_t seed,
                                std::size_t workers = 1, const std::string& label = "random") {
    if (budget == 0) {
        throw UsageError("random_search: budget must be at least 1");
    }
    if (objective.n_dims != space.size()) {
        throw UsageError("random_search: space and objective dimension counts differ");
    }
    std::vector<Evaluation> evals(budget);
    parallel_for(budget, workers, [&](std::size_t k) {
        Rng rng = make_stream(seed, "sample", k);
        evals[k] = timed_evaluate(objective, draw_sample(space, rng), k);
    });
    return collect_history(label, std::move(evals));
}

} // namespace hbrkga
