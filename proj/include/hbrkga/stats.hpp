#pragma once

/// @file stats.hpp
/// @brief Multi-run summaries, the Wilcoxon rank-sum (Mann-Whitney) test and
/// best-so-far curve aggregation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>
#include <hbrkga/objective.hpp>

namespace hbrkga {

struct RunSummary {
    std::string strategy;
    std::vector<double> bests;
    double mean = 0.0;
    std::optional<double> stddev; ///< sample (n - 1); absent for a single run
};

inline RunSummary summarize(std::string strategy, std::vector<double> bests) {
    if (bests.empty()) {
        throw UsageError("summarize: no runs");
    }
    RunSummary s{std::move(strategy), std::move(bests), 0.0, std::nullopt};
    // Shifted by the first value: exact for constant samples, stable otherwise.
    const auto n = static_cast<double>(s.bests.size());
    const double shift = s.bests.front();
    double sum = 0.0;
    for (double v : s.bests) {
        sum += v - shift;
    }
    const double centered_mean = sum / n;
    s.mean = shift + centered_mean;
    if (s.bests.size() > 1) {
        double ss = 0.0;
        for (double v : s.bests) {
            const double dev = (v - shift) - centered_mean;
            ss += dev * dev;
        }
        s.stddev = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

/// Final best score of each history.
inline RunSummary summarize(std::string strategy, const std::vector<RunHistory>& histories) {
    std::vector<double> bests;
    bests.reserve(histories.size());
    for (const auto& h : histories) {
        if (h.empty()) {
            throw UsageError("summarize: empty history");
        }
        bests.push_back(h.best().value);
    }
    return summarize(std::move(strategy), std::move(bests));
}

struct RankSumResult {
    double p_value = 1.0;
    bool reject = false;
    double u_statistic = 0.0; ///< U of the first sample
    bool exact = false;
};

namespace detail {

/// Midranks (1-based) of the pooled sample.
inline std::vector<double> midranks(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) {
            ++j;
        }
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

/// Number of n-subsets of {0..N-1}, indexed by U = (sum of 0-based ranks) - n(n-1)/2.
inline std::vector<double> u_distribution(std::size_t n, std::size_t m) {
    // ways[k][u]: k items chosen so far with statistic u, over a growing prefix
    const std::size_t max_u = n * m;
    std::vector<std::vector<double>> ways(n + 1, std::vector<double>(max_u + 1, 0.0));
    ways[0][0] = 1.0;
    // Adding element with 0-based rank r as the k-th chosen contributes r - (k - 1) to U.
    for (std::size_t r = 0; r < n + m; ++r) {
        for (std::size_t k = std::min(n, r + 1); k >= 1; --k) {
            if (r < k - 1) {
                continue;
            }
            const std::size_t add = r - (k - 1);
            if (add > m) {
                continue;
            }
            for (std::size_t u = 0; u + add <= max_u; ++u) {
                ways[k][u + add] += ways[k - 1][u];
            }
        }
    }
    return ways[n];
}

} // namespace detail

/// Two-sided Wilcoxon rank-sum test. Exact null distribution when the pooled
/// size is at most 12 and there are no ties; otherwise midranks and a normal
/// approximation with tie-corrected variance and continuity correction.
inline RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b,
                                   double alpha = 0.05) {
    if (a.size() < 3 || b.size() < 3) {
        throw UsageError("rank_sum_test: each sample needs at least 3 values");
    }
    for (double v : a) {
        if (!std::isfinite(v)) throw DomainError("rank_sum_test: non-finite value");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw DomainError("rank_sum_test: non-finite value");
    }

    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::size_t total = n + m;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());

    RankSumResult out;
    const auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
    if (*lo == *hi) {
        out.u_statistic = 0.5 * static_cast<double>(n * m);
        return out;
    }

    const std::vector<double> ranks = detail::midranks(pooled);
    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rank_sum_a += ranks[i];
    }
    const double u = rank_sum_a - 0.5 * static_cast<double>(n * (n + 1));
    out.u_statistic = u;

    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    const bool has_ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();

    if (total <= 12 && !has_ties) {
        const std::vector<double> dist = detail::u_distribution(n, m);
        const double count = std::accumulate(dist.begin(), dist.end(), 0.0);
        const auto u_int = static_cast<std::size_t>(std::llround(u));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            if (k <= u_int) lower += dist[k];
            if (k >= u_int) upper += dist[k];
        }
        out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / count);
        out.exact = true;
    } else {
        const double nn = static_cast<double>(n);
        const double mm = static_cast<double>(m);
        const double tt = static_cast<double>(total);
        double tie_term = 0.0;
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
                ++j;
            }
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        const double variance = nn * mm / 12.0 * ((tt + 1.0) - tie_term / (tt * (tt - 1.0)));
        if (variance <= 0.0) {
            out.p_value = 1.0;
        } else {
            const double mu = 0.5 * nn * mm;
            const double dev = std::max(0.0, std::abs(u - mu) - 0.5);
            const double z = dev / std::sqrt(variance);
            out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
        }
    }
    out.reject = out.p_value < alpha;
    return out;
}

/// Pointwise mean of equally long curves.
inline std::vector<double> mean_curve(const std::vector<std::vector<double>>& curves) {
    if (curves.empty()) {
        throw UsageError("mean_curve: no curves");
    }
    const std::size_t len = curves.front().size();
    std::vector<double> out(len, 0.0);
    for (const auto& c : curves) {
        if (c.size() != len) {
            throw UsageError("mean_curve: curves differ in length");
        }
        for (std::size_t i = 0; i < len; ++i) {
            out[i] += c[i];
        }
    }
    for (double& v : out) {
        v /= static_cast<double>(curves.size());
    }
    return out;
}

inline std::vector<double> best_so_far_values(const RunHistory& h) {
    std::vector<double> out;
    out.reserve(h.size());
    for (const auto& s : h.best_so_far()) {
        out.push_back(s.value);
    }
    return out;
}

inline std::vector<double> mean_curve(const std::vector<RunHistory>& histories) {
    std::vector<std::vector<double>> curves;
    curves.reserve(histories.size());
    for (const auto& h : histories) {
        curves.push_back(best_so_far_values(h));
    }
    return mean_curve(curves);
}

} // namespace hbrkga
