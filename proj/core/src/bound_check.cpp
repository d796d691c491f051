#include "splitlabel/bound_check.hpp"

#include <algorithm>
#include <cmath>

namespace splitlabel {

BoundEval grid_maximize(const NodeStats& stats, double step) {
    if (stats.n == 0) {
        return {};
    }
    const double hi = std::min(1.0, static_cast<double>(stats.m) / static_cast<double>(stats.n));
    BoundEval best{0.0, bound_value(stats, 0.0)};
    const auto points = static_cast<std::size_t>(std::floor(hi / step));
    for (std::size_t i = 1; i <= points + 1; ++i) {
        const double t = std::min(hi, static_cast<double>(i) * step);
        const double v = bound_value(stats, t);
        if (v > best.value) {
            best = {t, v};
        }
    }
    return best;
}

BoundEval refined_grid_maximize(const NodeStats& stats, double step, double fine_step) {
    BoundEval best = grid_maximize(stats, step);
    if (stats.n == 0) {
        return best;
    }
    const double hi = std::min(1.0, static_cast<double>(stats.m) / static_cast<double>(stats.n));
    const double lo = std::max(0.0, best.t_star - step);
    const double top = std::min(hi, best.t_star + step);
    const auto points = static_cast<std::size_t>(std::floor((top - lo) / fine_step));
    for (std::size_t i = 0; i <= points; ++i) {
        const double t = lo + static_cast<double>(i) * fine_step;
        const double v = bound_value(stats, t);
        if (v > best.value) {
            best = {t, v};
        }
    }
    return best;
}

NodeStats random_stats(Rng& rng, std::size_t max_n, std::size_t max_N) {
    NodeStats s;
    s.n = 1 + rng.uniform_index(max_n);
    s.m = rng.uniform_index(s.n + 1);
    s.N = s.n + rng.uniform_index(max_N - s.n + 1);
    return s;
}

EquivalenceReport check_ternary_against_grid(std::size_t cases, std::uint64_t seed,
                                             double grid_step, double tolerance) {
    Rng rng(seed);
    EquivalenceReport report;
    for (std::size_t i = 0; i < cases; ++i) {
        const NodeStats s = random_stats(rng);
        const double ternary = maximize_bound(s).value;
        const double grid = grid_maximize(s, grid_step).value;
        const double diff = std::abs(ternary - grid);
        report.max_abs_diff = std::max(report.max_abs_diff, diff);
        report.failures += diff > tolerance ? 1 : 0;
        report.below_grid += ternary < grid - 1e-9 ? 1 : 0;
        const double refined_diff =
            std::abs(ternary - refined_grid_maximize(s, grid_step, grid_step * 1e-4).value);
        report.refined_max_abs_diff = std::max(report.refined_max_abs_diff, refined_diff);
        report.refined_failures += refined_diff > tolerance ? 1 : 0;
        ++report.cases;
    }
    return report;
}

CoverageCell monte_carlo_cell(double p, std::size_t n, std::size_t N, std::size_t trials,
                              std::uint64_t seed) {
    CoverageCell cell{p, n, N, trials, 0, 0};
    const auto majority_total = static_cast<std::size_t>(std::llround(p * static_cast<double>(N)));
    const double target = p * static_cast<double>(N);
    Rng rng(seed);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        // Sequential draws without replacement.
        std::size_t remaining_major = majority_total;
        std::size_t remaining = N;
        std::size_t sampled_major = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.uniform_index(remaining) < remaining_major) {
                ++sampled_major;
                --remaining_major;
            }
            --remaining;
        }
        const std::size_t sampled_minor = n - sampled_major;
        // Class 0 wins ties, matching the tree's lowest-index rule.
        const bool picks_true_majority = sampled_major >= sampled_minor;
        const std::size_t m = std::max(sampled_major, sampled_minor);
        const double f_star = maximize_bound({m, n, N}).value;

        const std::size_t unlabeled_matching =
            picks_true_majority ? majority_total - sampled_major
                                : (N - majority_total) - sampled_minor;
        const double realized = static_cast<double>(n + unlabeled_matching);

        cell.violations += target < f_star ? 1 : 0;
        cell.realized_violations += realized < f_star ? 1 : 0;
    }
    return cell;
}

std::vector<CoverageCell> monte_carlo_suite(std::size_t trials, std::uint64_t seed) {
    std::vector<CoverageCell> cells;
    std::uint64_t stream = 0;
    for (double p : {0.6, 0.7, 0.8, 0.9, 0.95}) {
        for (std::size_t n : {20, 50, 100, 200}) {
            cells.push_back(monte_carlo_cell(p, n, 1000, trials, derive_seed(seed, stream++)));
        }
    }
    return cells;
}

}  // namespace splitlabel
