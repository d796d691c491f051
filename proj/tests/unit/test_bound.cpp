#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "splitlabel/bound.hpp"
#include "splitlabel/bound_check.hpp"
#include "splitlabel/error.hpp"
#include "splitlabel/random.hpp"

namespace splitlabel {
namespace {

// Written out again here so the expectations do not flow through bound_value.
double reference_bound(double m, double n, double N, double t) {
    if (n == 0.0) {
        return 0.0;
    }
    return n + (1.0 - std::exp(-2.0 * n * t * t)) * (N - n) * (m / n - t);
}

double reference_grid_max(const NodeStats& s, double step) {
    const double m = static_cast<double>(s.m);
    const double n = static_cast<double>(s.n);
    const double N = static_cast<double>(s.N);
    const double hi = std::min(1.0, m / n);
    double best = reference_bound(m, n, N, 0.0);
    for (double t = step; t < hi; t += step) {
        best = std::max(best, reference_bound(m, n, N, t));
    }
    return std::max(best, reference_bound(m, n, N, hi));
}

// Coarse grid maximum rescanned at 1e-9 within one coarse step of the best point.
double reference_refined_max(const NodeStats& s, double step) {
    const double m = static_cast<double>(s.m);
    const double n = static_cast<double>(s.n);
    const double N = static_cast<double>(s.N);
    const double hi = std::min(1.0, m / n);
    double best_t = 0.0;
    double best = reference_bound(m, n, N, 0.0);
    for (double t = step; t < hi; t += step) {
        const double v = reference_bound(m, n, N, t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    if (reference_bound(m, n, N, hi) > best) {
        best = reference_bound(m, n, N, hi);
        best_t = hi;
    }
    const double lo = std::max(0.0, best_t - step);
    const double top = std::min(hi, best_t + step);
    for (double t = lo; t <= top; t += 1e-9) {
        best = std::max(best, reference_bound(m, n, N, t));
    }
    return best;
}

struct FrozenMax {
    NodeStats stats;
    double value;
};

// Dense-grid maxima (step 1e-5) refined with 50-digit arithmetic.
const std::vector<FrozenMax> kFrozenMaxima = {
    {{9, 10, 100}, 55.49392074076283},
    {{10, 11, 100}, 57.92044749700747},
    {{9, 10, 60}, 35.274400411534906},
    {{3, 8, 40}, 10.676214744488377},
    {{5, 5, 50}, 26.62766473004222},
    {{1, 1, 200}, 41.93307756797279},
    {{49, 50, 50}, 50.0},
    {{40, 50, 50}, 50.0},
};

TEST(BoundValue, MatchesFrozenPoint) {
    EXPECT_NEAR(bound_value({9, 10, 100}, 0.2), 44.692275260615041704, 1e-12);
}

TEST(BoundValue, ZeroWhenNothingLabeled) {
    EXPECT_EQ(bound_value({0, 0, 100}, 0.3), 0.0);
    EXPECT_EQ(maximize_bound({0, 0, 100}).value, 0.0);
}

TEST(BoundValue, EqualsNAtZeroBuffer) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const NodeStats s = random_stats(rng);
        EXPECT_EQ(bound_value(s, 0.0), static_cast<double>(s.n));
    }
}

TEST(BoundValue, RejectsInvalidInputs) {
    EXPECT_THROW(bound_value({5, 4, 10}, 0.1), ContractViolation);
    EXPECT_THROW(bound_value({1, 4, 3}, 0.1), ContractViolation);
    EXPECT_THROW(bound_value({1, 4, 10}, -0.1), ContractViolation);
    EXPECT_THROW(bound_value({1, 4, 10}, 1.5), ContractViolation);
}

TEST(MaximizeBound, MatchesFrozenMaxima) {
    for (const auto& f : kFrozenMaxima) {
        EXPECT_NEAR(maximize_bound(f.stats).value, f.value, 1e-6)
            << f.stats.m << "/" << f.stats.n << "/" << f.stats.N;
    }
}

TEST(MaximizeBound, FullyLabeledNodeIsExact) {
    for (std::size_t n : {1, 2, 7, 50, 500}) {
        for (std::size_t m : {std::size_t{1}, n / 2 + 1, n}) {
            const auto eval = maximize_bound({m, n, n});
            EXPECT_EQ(eval.value, static_cast<double>(n));
        }
    }
}

TEST(MaximizeBound, NeverBelowLabeledCount) {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const NodeStats s = random_stats(rng);
        const auto eval = maximize_bound(s);
        EXPECT_GE(eval.value, static_cast<double>(s.n));
        EXPECT_LE(eval.value, static_cast<double>(s.N));
        EXPECT_GE(eval.t_star, 0.0);
        EXPECT_LE(eval.t_star, std::min(1.0, static_cast<double>(s.m) / s.n) + 1e-12);
    }
}

TEST(MaximizeBound, AgreesWithRefinedGrid) {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const NodeStats s = random_stats(rng);
        EXPECT_NEAR(maximize_bound(s).value, reference_refined_max(s, 1e-5), 1e-6);
    }
}

TEST(MaximizeBound, NeverBelowCoarseGrid) {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
        const NodeStats s = random_stats(rng);
        EXPECT_GE(maximize_bound(s).value, reference_grid_max(s, 1e-5) - 1e-9);
    }
}

// Small N n keeps the curvature low enough for the coarse grid alone.
TEST(MaximizeBound, AgreesWithCoarseGridOnSmallNodes) {
    Rng rng(16);
    for (int i = 0; i < 200; ++i) {
        const NodeStats s = random_stats(rng, 20, 200);
        EXPECT_NEAR(maximize_bound(s).value, reference_grid_max(s, 1e-5), 1e-6);
    }
    EXPECT_NEAR(maximize_bound({9, 10, 100}).value, reference_grid_max({9, 10, 100}, 1e-5), 1e-6);
}

TEST(MaximizeBound, GridHelperAgreesWithReferenceGrid) {
    Rng rng(14);
    for (int i = 0; i < 50; ++i) {
        const NodeStats s = random_stats(rng);
        EXPECT_NEAR(grid_maximize(s, 1e-5).value, reference_grid_max(s, 1e-5), 1e-9);
    }
}

// Along the grid the bound rises to a single peak and then falls.
TEST(MaximizeBound, ObjectiveIsUnimodalOnGrid) {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
        const NodeStats s = random_stats(rng);
        const double hi = std::min(1.0, static_cast<double>(s.m) / s.n);
        int direction_changes = 0;
        int last_sign = 1;
        double prev = bound_value(s, 0.0);
        for (int k = 1; k <= 2000; ++k) {
            const double v = bound_value(s, hi * k / 2000.0);
            const int sign = v > prev + 1e-9 ? 1 : (v < prev - 1e-9 ? -1 : last_sign);
            direction_changes += sign != last_sign ? 1 : 0;
            last_sign = sign;
            prev = v;
        }
        EXPECT_LE(direction_changes, 1) << s.m << "/" << s.n << "/" << s.N;
    }
}

TEST(MaximizeBound, MonotoneInMajorityCount) {
    for (std::size_t m = 1; m < 40; ++m) {
        EXPECT_LE(maximize_bound({m, 40, 400}).value, maximize_bound({m + 1, 40, 400}).value);
    }
}

TEST(ScoreLabel, AnticipatesConfirmedMajority) {
    EXPECT_NEAR(score_label({9, 10, 100}), 57.92044749700747, 1e-6);
    EXPECT_NEAR(score_label({0, 0, 200}), 41.93307756797279, 1e-6);
    EXPECT_THROW(score_label({5, 5, 5}), NoConsumableExampleError);
}

TEST(ScoreSplit, SumsChildren) {
    const std::vector<NodeStats> children{{9, 10, 60}, {3, 8, 40}};
    EXPECT_NEAR(score_split(children), 35.274400411534906 + 10.676214744488377, 1e-6);
    EXPECT_THROW(score_split({}), ContractViolation);
}

TEST(ScoreSplit, UnlabeledChildrenContributeZero) {
    const std::vector<NodeStats> children{{0, 0, 60}, {0, 0, 40}};
    EXPECT_EQ(score_split(children), 0.0);
}

TEST(BoundCheck, EquivalenceSuiteAgainstRefinedGrid) {
    const auto report = check_ternary_against_grid(100, 3);
    EXPECT_EQ(report.cases, 100u);
    EXPECT_EQ(report.below_grid, 0u);
    EXPECT_EQ(report.refined_failures, 0u);
    EXPECT_LE(report.refined_max_abs_diff, 1e-6);
}

TEST(BoundCheck, RefinedGridNeverBelowCoarseGrid) {
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        const NodeStats s = random_stats(rng);
        EXPECT_GE(refined_grid_maximize(s, 1e-5).value, grid_maximize(s, 1e-5).value);
    }
}

// With n = N every point is labeled, so F* = N exceeds p N but never the realized count.
TEST(BoundCheck, FullSampleMatchesRealizedCount) {
    const auto cell = monte_carlo_cell(0.8, 200, 200, 500, 1);
    EXPECT_EQ(cell.violations, 500u);
    EXPECT_EQ(cell.realized_violations, 0u);
}

TEST(BoundCheck, CellsAreReproducible) {
    const auto a = monte_carlo_cell(0.9, 50, 1000, 300, 7);
    const auto b = monte_carlo_cell(0.9, 50, 1000, 300, 7);
    EXPECT_EQ(a.violations, b.violations);
    EXPECT_EQ(a.realized_violations, b.realized_violations);
    EXPECT_EQ(monte_carlo_suite(10, 1).size(), 20u);
}

}  // namespace
}  // namespace splitlabel
