#pragma once

#include <cstddef>
#include <span>

namespace splitlabel {

// Counts describing one node: m bound-set labels of the majority class out
// of n bound-set labels, in a node of N examples.
struct NodeStats {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t N = 0;

    bool valid() const noexcept { return m <= n && n <= N; }

    friend bool operator==(const NodeStats&, const NodeStats&) = default;
};

struct BoundEval {
    double t_star = 0.0;
    double value = 0.0;
};

struct TernaryOptions {
    double bracket_tolerance = 1e-7;
    int max_iterations = 200;
};

// Lower bound on expected correct labels for buffer t:
//   n + (1 - exp(-2 n t^2)) (N - n) (m/n - t)
// Zero when n == 0. Throws ContractViolation on invalid stats or t outside [0,1].
double bound_value(const NodeStats& stats, double t);

// Maximizes bound_value over t in [0, min(1, m/n)] by ternary search.
// The result never falls below bound_value(stats, 0) = n.
BoundEval maximize_bound(const NodeStats& stats, const TernaryOptions& options = {});

// Anticipated bound after the oracle confirms the majority label.
// Requires n < N (NoConsumableExampleError otherwise).
double score_label(const NodeStats& stats, const TernaryOptions& options = {});

// Sum of maximized bounds over candidate children. Empty input is a contract violation.
double score_split(std::span<const NodeStats> children, const TernaryOptions& options = {});

}  // namespace splitlabel
