#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <hbrkga/objective.hpp>
#include <hbrkga/rng.hpp>

using namespace hbrkga;

TEST(WrapMaximize, Negates) {
    EXPECT_EQ(wrap_maximize(1.0).value, -1.0);
    EXPECT_EQ(wrap_maximize(0.0).value, 0.0);
    EXPECT_THROW(wrap_maximize(std::numeric_limits<double>::quiet_NaN()), DomainError);
    EXPECT_THROW(wrap_maximize(std::numeric_limits<double>::infinity()), DomainError);
}

TEST(WrapMaximize, ArgminOfWrappedIsArgmaxOfRaw) {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + index_draw(rng, 30);
        std::vector<double> raw(n);
        std::vector<Score> wrapped(n);
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = uniform_draw(rng, -5, 5);
            wrapped[i] = wrap_maximize(raw[i]);
        }
        const auto argmax = std::max_element(raw.begin(), raw.end()) - raw.begin();
        const auto argmin = std::min_element(wrapped.begin(), wrapped.end()) - wrapped.begin();
        ASSERT_EQ(argmax, argmin);
    }
}

TEST(Metrics, Precision) {
    EXPECT_EQ(precision(ConfusionCounts({{5, 0, 3}}), 0), 1.0);
    EXPECT_DOUBLE_EQ(precision(ConfusionCounts({{8, 2, 0}}), 0), 0.8);
    EXPECT_EQ(precision(ConfusionCounts({{0, 0, 4}}), 0), 0.0);
    EXPECT_THROW(precision(ConfusionCounts({{1, 1, 1}}), 1), UsageError);
}

TEST(Metrics, Recall) {
    EXPECT_EQ(recall(ConfusionCounts({{5, 3, 0}}), 0), 1.0);
    EXPECT_DOUBLE_EQ(recall(ConfusionCounts({{8, 0, 1}}), 0), 8.0 / 9.0);
    EXPECT_EQ(recall(ConfusionCounts({{0, 4, 0}}), 0), 0.0);
}

TEST(Metrics, MacroF1) {
    EXPECT_EQ(macro_f1(ConfusionCounts({{4, 0, 0}, {7, 0, 0}, {1, 0, 0}})), 1.0);
    // pi = 0.8, rho = 8/9, F1 = 2 pi rho / (pi + rho) = 16/19
    EXPECT_NEAR(macro_f1(ConfusionCounts({{8, 2, 1}})), 16.0 / 19.0, 1e-15);
    EXPECT_NEAR(macro_f1(ConfusionCounts({{8, 2, 1}})), 0.8421, 1e-4);
    EXPECT_THROW(macro_f1(ConfusionCounts{}), UsageError);
    EXPECT_EQ(macro_f1(ConfusionCounts({{0, 0, 0}, {3, 0, 0}})), 0.5);
}

TEST(Metrics, FromPredictions) {
    const auto c = ConfusionCounts::from_predictions({0, 0, 1, 2}, {0, 1, 1, 2}, 3);
    EXPECT_EQ(c.at(0).tp, 1u);
    EXPECT_EQ(c.at(0).fn, 1u);
    EXPECT_EQ(c.at(1).fp, 1u);
    EXPECT_EQ(c.at(1).tp, 1u);
    EXPECT_EQ(c.at(2).tp, 1u);
    EXPECT_THROW(ConfusionCounts::from_predictions({0}, {3}, 3), UsageError);
}

TEST(MetricsProperty, RangesAndPerfectIff) {
    Rng rng(2024);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t classes = 1 + index_draw(rng, 5);
        std::vector<ClassCounts> counts(classes);
        bool perfect = true;
        for (auto& k : counts) {
            k.tp = index_draw(rng, 4);
            k.fp = index_draw(rng, 3);
            k.fn = index_draw(rng, 3);
            perfect = perfect && k.fp == 0 && k.fn == 0 && k.tp > 0;
        }
        const ConfusionCounts cc(counts);
        for (std::size_t c = 0; c < classes; ++c) {
            ASSERT_GE(precision(cc, c), 0.0);
            ASSERT_LE(precision(cc, c), 1.0);
            ASSERT_GE(recall(cc, c), 0.0);
            ASSERT_LE(recall(cc, c), 1.0);
        }
        const double m = macro_f1(cc);
        ASSERT_GE(m, 0.0);
        ASSERT_LE(m, 1.0);
        ASSERT_EQ(m == 1.0, perfect);
    }
}

TEST(RunHistory, RunningMinimum) {
    RunHistory h;
    h = record_trial(h, {"s", 0, {}, Score{0.5}, 0.0});
    ASSERT_EQ(h.best_so_far().size(), 1u);
    EXPECT_EQ(h.best_so_far()[0].value, 0.5);
    h = record_trial(h, {"s", 1, {}, Score{0.3}, 0.0});
    h = record_trial(h, {"s", 2, {}, Score{0.4}, 0.0});
    std::vector<double> curve;
    for (auto s : h.best_so_far()) curve.push_back(s.value);
    EXPECT_EQ(curve, (std::vector<double>{0.5, 0.3, 0.3}));
    EXPECT_EQ(h.best_index(), 1u);
}

TEST(RunHistory, RejectsOutOfOrderIndex) {
    RunHistory h;
    EXPECT_THROW(h.append({"s", 1, {}, Score{0.1}, 0.0}), UsageError);
    h.append({"s", 0, {}, Score{0.1}, 0.0});
    EXPECT_THROW(h.append({"s", 0, {}, Score{0.1}, 0.0}), UsageError);
}

TEST(RunHistoryProperty, FuzzedCurveIsNonIncreasing) {
    Rng rng(11);
    for (int run = 0; run < 50; ++run) {
        RunHistory h;
        double min_score = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < 240; ++i) {
            const double s = uniform_draw(rng, -10, 10);
            min_score = std::min(min_score, s);
            h.append({"fuzz", i, {}, Score{s}, 0.0});
        }
        ASSERT_EQ(h.size(), 240u);
        for (std::size_t i = 1; i < h.size(); ++i) {
            ASSERT_LE(h.best_so_far()[i], h.best_so_far()[i - 1]);
        }
        ASSERT_EQ(h.best().value, min_score);
    }
}

TEST(Synthetic, KnownValues) {
    EXPECT_EQ(sphere(HyperVector{0, 0, 0}).value, 0.0);
    EXPECT_EQ(rastrigin(HyperVector{0, 0, 0, 0, 0}).value, 0.0);
    EXPECT_EQ(sphere(HyperVector{1, 2}).value, 5.0);
    EXPECT_EQ(rosenbrock(HyperVector{1, 1, 1}).value, 0.0);
    // cos(2 pi k) = 1 at integers, so rastrigin(1, 2) = 20 + (1 - 10) + (4 - 10) = 5
    EXPECT_NEAR(rastrigin(HyperVector{1, 2}).value, 5.0, 1e-12);
}

TEST(Synthetic, ByName) {
    const auto obj = synthetic_objective("sphere", 2);
    EXPECT_EQ(obj.evaluate(HyperVector{3, 4}).value, 25.0);
    EXPECT_THROW(synthetic_objective("ackley", 2), UsageError);
    EXPECT_THROW(obj.evaluate(HyperVector{1}), UsageError);
}

TEST(CountingObjective, CountsAcrossCopies) {
    CountingObjective counted(synthetic_objective("sphere", 1));
    auto a = counted.contract();
    auto b = a;
    a.evaluate(HyperVector{1});
    b.evaluate(HyperVector{2});
    EXPECT_EQ(counted.calls(), 2u);
}

TEST(TimedEvaluate, WrapsFailuresWithTrialContext) {
    ObjectiveContract bad{"bad", 1, [](const HyperVector&) -> Score { throw std::runtime_error("boom"); }};
    try {
        (void)timed_evaluate(bad, HyperVector{0}, 17);
        FAIL() << "expected EvaluationError";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.trial_index(), 17u);
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
    ObjectiveContract nan{"nan", 1, [](const HyperVector&) {
                              return Score{std::numeric_limits<double>::quiet_NaN()};
                          }};
    EXPECT_THROW((void)timed_evaluate(nan, HyperVector{0}, 0), EvaluationError);
}
