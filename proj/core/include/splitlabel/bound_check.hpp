#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "splitlabel/bound.hpp"
#include "splitlabel/random.hpp"

namespace splitlabel {

// Exhaustive maximum of bound_value on {0, step, 2 step, ...} ∪ {min(1, m/n)}.
BoundEval grid_maximize(const NodeStats& stats, double step);

// grid_maximize followed by a scan at fine_step within one coarse step of the best point.
BoundEval refined_grid_maximize(const NodeStats& stats, double step, double fine_step = 1e-9);

// Uniform random stats with 1 <= n <= max_n, 0 <= m <= n, n <= N <= max_N.
NodeStats random_stats(Rng& rng, std::size_t max_n = 500, std::size_t max_N = 10000);

struct EquivalenceReport {
    std::size_t cases = 0;
    std::size_t failures = 0;
    double max_abs_diff = 0.0;
    // Same cases against refined_grid_maximize.
    std::size_t refined_failures = 0;
    double refined_max_abs_diff = 0.0;
    // Cases where the ternary value falls below the coarse grid value.
    std::size_t below_grid = 0;
};

EquivalenceReport check_ternary_against_grid(std::size_t cases, std::uint64_t seed,
                                             double grid_step = 1e-5, double tolerance = 1e-6);

// One Monte-Carlo cell: a population of N examples, round(p N) of class 0,
// sampled n at a time without replacement.
struct CoverageCell {
    double p = 0.0;
    std::size_t n = 0;
    std::size_t N = 0;
    std::size_t trials = 0;
    // Trials with p N < F*.
    std::size_t violations = 0;
    // Trials where F* exceeds the realized correct count of the majority-vote
    // assignment (n oracle labels plus unlabeled members of the empirical majority).
    std::size_t realized_violations = 0;

    double rate() const { return trials ? static_cast<double>(violations) / trials : 0.0; }
    double realized_rate() const {
        return trials ? static_cast<double>(realized_violations) / trials : 0.0;
    }
};

CoverageCell monte_carlo_cell(double p, std::size_t n, std::size_t N, std::size_t trials,
                              std::uint64_t seed);

// p in {0.6, 0.7, 0.8, 0.9, 0.95} x n in {20, 50, 100, 200}, N = 1000.
std::vector<CoverageCell> monte_carlo_suite(std::size_t trials, std::uint64_t seed);

}  // namespace splitlabel
