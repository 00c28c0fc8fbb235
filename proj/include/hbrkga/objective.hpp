#pragma once

/// @file objective.hpp
/// @brief Evaluation contract, scores, classification metrics and trial logs.
///
/// All strategies minimize. Metrics that are naturally maximized (macro-F1)
/// enter the optimizers through wrap_maximize().

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <compare>
#include <exception>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>

namespace hbrkga {

/// Objective value; lower is better.
struct Score {
    double value = std::numeric_limits<double>::infinity();

    friend auto operator<=>(const Score&, const Score&) = default;
};

inline Score make_score(double value) {
    if (!std::isfinite(value)) {
        throw DomainError("score must be finite");
    }
    return Score{value};
}

/// Adapt a maximized metric to the minimizing convention.
inline Score wrap_maximize(double metric_value) {
    if (!std::isfinite(metric_value)) {
        throw DomainError("wrap_maximize: non-finite metric");
    }
    return Score{-metric_value};
}

/// f(gamma) for a fixed learner and dataset. evaluate must be safe to call
/// concurrently and deterministic for a given gamma.
struct ObjectiveContract {
    std::string descriptor;
    std::size_t n_dims = 0;
    std::function<Score(const HyperVector&)> evaluate;
};

/// Wraps an objective and counts calls; the counter is shared by copies.
class CountingObjective {
  public:
    explicit CountingObjective(ObjectiveContract inner)
        : inner_(std::make_shared<ObjectiveContract>(std::move(inner))),
          calls_(std::make_shared<std::atomic<std::size_t>>(0)) {}

    [[nodiscard]] ObjectiveContract contract() const {
        return ObjectiveContract{inner_->descriptor, inner_->n_dims,
                                 [inner = inner_, calls = calls_](const HyperVector& g) {
                                     calls->fetch_add(1, std::memory_order_relaxed);
                                     return inner->evaluate(g);
                                 }};
    }

    [[nodiscard]] std::size_t calls() const noexcept { return calls_->load(); }

  private:
    std::shared_ptr<ObjectiveContract> inner_;
    std::shared_ptr<std::atomic<std::size_t>> calls_;
};

// ---------------------------------------------------------------------------
// Classification metrics

struct ClassCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

/// Per-class TP/FP/FN.
class ConfusionCounts {
  public:
    ConfusionCounts() = default;
    explicit ConfusionCounts(std::size_t classes) : counts_(classes) {}
    explicit ConfusionCounts(std::vector<ClassCounts> counts) : counts_(std::move(counts)) {}

    /// Tally predictions against labels. Both must hold class indices below `classes`.
    static ConfusionCounts from_predictions(const std::vector<std::size_t>& labels,
                                            const std::vector<std::size_t>& predicted,
                                            std::size_t classes) {
        if (labels.size() != predicted.size()) {
            throw UsageError("labels and predictions differ in length");
        }
        ConfusionCounts out(classes);
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k] >= classes || predicted[k] >= classes) {
                throw UsageError("class index out of range");
            }
            if (labels[k] == predicted[k]) {
                ++out.counts_[labels[k]].tp;
            } else {
                ++out.counts_[predicted[k]].fp;
                ++out.counts_[labels[k]].fn;
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t classes() const noexcept { return counts_.size(); }

    [[nodiscard]] const ClassCounts& at(std::size_t c) const {
        if (c >= counts_.size()) {
            throw UsageError("class " + std::to_string(c) + " does not exist");
        }
        return counts_[c];
    }

    ClassCounts& at(std::size_t c) {
        if (c >= counts_.size()) {
            throw UsageError("class " + std::to_string(c) + " does not exist");
        }
        return counts_[c];
    }

  private:
    std::vector<ClassCounts> counts_;
};

namespace detail {
inline double safe_ratio(double num, double den) noexcept {
    return den == 0.0 ? 0.0 : num / den;
}
} // namespace detail

/// tp / (tp + fp), 0 when nothing was predicted as c.
inline double precision(const ConfusionCounts& counts, std::size_t c) {
    const auto& k = counts.at(c);
    return detail::safe_ratio(static_cast<double>(k.tp), static_cast<double>(k.tp + k.fp));
}

/// tp / (tp + fn), 0 when c never occurs.
inline double recall(const ConfusionCounts& counts, std::size_t c) {
    const auto& k = counts.at(c);
    return detail::safe_ratio(static_cast<double>(k.tp), static_cast<double>(k.tp + k.fn));
}

inline double f1(const ConfusionCounts& counts, std::size_t c) {
    const double p = precision(counts, c);
    const double r = recall(counts, c);
    return detail::safe_ratio(2.0 * p * r, p + r);
}

/// Unweighted mean of per-class F1.
inline double macro_f1(const ConfusionCounts& counts) {
    if (counts.classes() == 0) {
        throw UsageError("macro_f1: no classes");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < counts.classes(); ++c) {
        sum += f1(counts, c);
    }
    return sum / static_cast<double>(counts.classes());
}

// ---------------------------------------------------------------------------
// Trial log

struct TrialRecord {
    std::string strategy;
    std::size_t trial_index = 0;
    HyperVector gamma;
    Score score;
    double wall_time = 0.0; ///< seconds
};

/// Ordered evaluations plus the running minimum of their scores.
class RunHistory {
  public:
    [[nodiscard]] const std::vector<TrialRecord>& trials() const noexcept { return trials_; }
    [[nodiscard]] const std::vector<Score>& best_so_far() const noexcept { return best_so_far_; }
    [[nodiscard]] std::size_t size() const noexcept { return trials_.size(); }
    [[nodiscard]] bool empty() const noexcept { return trials_.empty(); }

    /// Best score over all trials; +inf on an empty history.
    [[nodiscard]] Score best() const noexcept {
        return best_so_far_.empty() ? Score{} : best_so_far_.back();
    }

    /// Index of the first trial reaching best().
    [[nodiscard]] std::size_t best_index() const {
        if (trials_.empty()) {
            throw UsageError("best_index on empty history");
        }
        std::size_t idx = 0;
        for (std::size_t i = 1; i < trials_.size(); ++i) {
            if (trials_[i].score < trials_[idx].score) {
                idx = i;
            }
        }
        return idx;
    }

    void append(TrialRecord record) {
        if (record.trial_index != trials_.size()) {
            throw UsageError("trial_index " + std::to_string(record.trial_index) +
                             " out of order, expected " + std::to_string(trials_.size()));
        }
        const Score running =
            best_so_far_.empty() ? record.score : std::min(best_so_far_.back(), record.score);
        best_so_far_.push_back(running);
        trials_.push_back(std::move(record));
    }

  private:
    std::vector<TrialRecord> trials_;
    std::vector<Score> best_so_far_;
};

inline RunHistory record_trial(RunHistory history, TrialRecord record) {
    history.append(std::move(record));
    return history;
}

/// One completed evaluation before it receives its position in a history.
struct Evaluation {
    HyperVector gamma;
    Score score;
    double wall_time = 0.0;
};

/// Evaluate and time one candidate. Non-finite scores and exceptions from
/// the objective surface as EvaluationError carrying `trial_index`.
inline Evaluation timed_evaluate(const ObjectiveContract& objective, const HyperVector& gamma,
                                 std::size_t trial_index) {
    const auto start = std::chrono::steady_clock::now();
    Score score;
    try {
        score = objective.evaluate(gamma);
    } catch (const EvaluationError&) {
        throw;
    } catch (const std::exception& e) {
        throw EvaluationError(objective.descriptor + ": " + e.what(), trial_index);
    }
    if (!std::isfinite(score.value)) {
        throw EvaluationError(objective.descriptor + ": non-finite score", trial_index);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return Evaluation{gamma, score, elapsed.count()};
}

inline void append_evaluation(RunHistory& history, const std::string& strategy, Evaluation e) {
    history.append(TrialRecord{strategy, history.size(), std::move(e.gamma), e.score, e.wall_time});
}

// ---------------------------------------------------------------------------
// Synthetic objectives

inline double sphere_value(const HyperVector& x) {
    double s = 0.0;
    for (double v : x.values) {
        s += v * v;
    }
    return s;
}

inline double rastrigin_value(const HyperVector& x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x.values) {
        s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    }
    return s;
}

inline double rosenbrock_value(const HyperVector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

inline Score sphere(const HyperVector& x) { return Score{sphere_value(x)}; }
inline Score rastrigin(const HyperVector& x) { return Score{rastrigin_value(x)}; }
inline Score rosenbrock(const HyperVector& x) { return Score{rosenbrock_value(x)}; }

/// Build a synthetic objective by name: sphere, rastrigin or rosenbrock.
inline ObjectiveContract synthetic_objective(const std::string& name, std::size_t n_dims) {
    Score (*fn)(const HyperVector&) = nullptr;
    if (name == "sphere") {
        fn = &sphere;
    } else if (name == "rastrigin") {
        fn = &rastrigin;
    } else if (name == "rosenbrock") {
        fn = &rosenbrock;
    } else {
        throw UsageError("unknown synthetic objective '" + name + "'");
    }
    return ObjectiveContract{name, n_dims, [fn, n_dims](const HyperVector& x) {
                                 if (x.size() != n_dims) {
                                     throw UsageError("objective dimension mismatch");
                                 }
                                 return fn(x);
                             }};
}

} // namespace hbrkga
