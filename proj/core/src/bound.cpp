#include "splitlabel/bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

void require_valid(const NodeStats& s) {
    if (!s.valid()) {
        throw ContractViolation("invalid node stats (m=" + std::to_string(s.m) +
                                ", n=" + std::to_string(s.n) + ", N=" + std::to_string(s.N) +
                                "); need m <= n <= N");
    }
}

double evaluate(const NodeStats& s, double t) {
    const double n = static_cast<double>(s.n);
    const double unlabeled = static_cast<double>(s.N - s.n);
    const double proportion = static_cast<double>(s.m) / n;
    return n + (1.0 - std::exp(-2.0 * n * t * t)) * unlabeled * (proportion - t);
}

}  // namespace

double bound_value(const NodeStats& stats, double t) {
    require_valid(stats);
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ContractViolation("buffer t must lie in [0, 1]");
    }
    if (stats.n == 0) {
        return 0.0;
    }
    return evaluate(stats, t);
}

BoundEval maximize_bound(const NodeStats& stats, const TernaryOptions& options) {
    require_valid(stats);
    if (stats.n == 0) {
        return {};
    }
    const double at_zero = static_cast<double>(stats.n);

    double lo = 0.0;
    double hi = std::min(1.0, static_cast<double>(stats.m) / static_cast<double>(stats.n));
    for (int i = 0; i < options.max_iterations && hi - lo > options.bracket_tolerance; ++i) {
        const double third = (hi - lo) / 3.0;
        const double a = lo + third;
        const double b = hi - third;
        if (evaluate(stats, a) < evaluate(stats, b)) {
            lo = a;
        } else {
            hi = b;
        }
    }
    const double t = 0.5 * (lo + hi);
    const double value = evaluate(stats, t);
    if (!(value > at_zero)) {
        return {0.0, at_zero};
    }
    return {t, value};
}

double score_label(const NodeStats& stats, const TernaryOptions& options) {
    require_valid(stats);
    if (stats.n >= stats.N) {
        throw NoConsumableExampleError("score_label on a node with n == N");
    }
    return maximize_bound({stats.m + 1, stats.n + 1, stats.N}, options).value;
}

double score_split(std::span<const NodeStats> children, const TernaryOptions& options) {
    if (children.empty()) {
        throw ContractViolation("score_split needs at least one child");
    }
    double total = 0.0;
    for (const NodeStats& child : children) {
        total += maximize_bound(child, options).value;
    }
    return total;
}

}  // namespace splitlabel
