#include "splitlabel/splitters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "splitlabel/error.hpp"
#include "splitlabel/logistic.hpp"
#include "splitlabel/random.hpp"

namespace splitlabel {
namespace {

bool all_rows_identical(const FeatureMatrix& x) {
    for (Eigen::Index i = 1; i < x.rows(); ++i) {
        if (x.row(i) != x.row(0)) {
            return false;
        }
    }
    return true;
}

std::size_t position_of(const std::vector<std::size_t>& sorted, std::size_t example_id) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), example_id);
    if (it == sorted.end() || *it != example_id) {
        throw MembershipError("example " + std::to_string(example_id) + " not in node");
    }
    return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

std::string to_string(SplitterKind kind) {
    return kind == SplitterKind::kmeans2 ? "kmeans2" : "logistic";
}

SplitterKind parse_splitter_kind(const std::string& text) {
    if (text == "kmeans2") {
        return SplitterKind::kmeans2;
    }
    if (text == "logistic") {
        return SplitterKind::logistic;
    }
    throw std::invalid_argument("unknown splitter '" + text + "' (expected logistic or kmeans2)");
}

void SplitterConfig::validate() const {
    if (kmeans_max_iters < 1 || lr_epochs < 1 || min_train_examples < 1) {
        throw ContractViolation("splitter counts must be >= 1");
    }
    if (!(lr_step > 0.0)) {
        throw ContractViolation("lr_step must be > 0");
    }
    if (!(lr_l2 >= 0.0) || !(kmeans_tol >= 0.0)) {
        throw ContractViolation("lr_l2 and kmeans_tol must be >= 0");
    }
}

std::optional<Partition> kmeans_partition(NodeId node, const FeatureMatrix& x,
                                          std::uint64_t seed, const SplitterConfig& config) {
    const Eigen::Index rows = x.rows();
    if (rows < 2 || all_rows_identical(x)) {
        return std::nullopt;
    }
    Rng rng(seed);

    // k-means++ seeding for k = 2.
    FeatureMatrix centers(2, x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(rows))));
    const Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    const double target = rng.unit_real() * d2.sum();
    Eigen::Index pick = rows - 1;
    double running = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        running += d2(i);
        if (running > target && d2(i) > 0.0) {
            pick = i;
            break;
        }
    }
    if (d2(pick) == 0.0) {
        for (pick = rows - 1; d2(pick) == 0.0; --pick) {
        }
    }
    centers.row(1) = x.row(pick);

    std::vector<std::size_t> assignment(static_cast<std::size_t>(rows), 0);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < config.kmeans_max_iters; ++iter) {
        const Eigen::VectorXd to0 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
        const Eigen::VectorXd to1 = (x.rowwise() - centers.row(1)).rowwise().squaredNorm();
        double inertia = 0.0;
        Eigen::RowVectorXd sum0 = Eigen::RowVectorXd::Zero(x.cols());
        Eigen::RowVectorXd sum1 = Eigen::RowVectorXd::Zero(x.cols());
        std::size_t count0 = 0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            const bool second = to1(i) < to0(i);
            assignment[static_cast<std::size_t>(i)] = second ? 1 : 0;
            inertia += second ? to1(i) : to0(i);
            if (second) {
                sum1 += x.row(i);
            } else {
                sum0 += x.row(i);
                ++count0;
            }
        }
        const std::size_t count1 = static_cast<std::size_t>(rows) - count0;
        if (count0 == 0 || count1 == 0) {
            return std::nullopt;
        }
        centers.row(0) = sum0 / static_cast<double>(count0);
        centers.row(1) = sum1 / static_cast<double>(count1);

        const bool converged =
            std::isfinite(previous) &&
            std::abs(previous - inertia) <= config.kmeans_tol * std::max(previous, 1e-300);
        previous = inertia;
        if (converged) {
            break;
        }
    }
    return Partition{node, std::move(assignment), 2};
}

std::optional<Partition> logistic_partition(NodeId node, const FeatureMatrix& node_features,
                                            std::span<const std::size_t> node_examples,
                                            std::span<const LabeledExample> isolated_set,
                                            std::size_t num_classes,
                                            const SplitterConfig& config) {
    if (isolated_set.size() < config.min_train_examples) {
        return std::nullopt;
    }
    const ClassId first = isolated_set.front().label;
    const bool single_class = std::all_of(isolated_set.begin(), isolated_set.end(),
                                          [first](const auto& e) { return e.label == first; });
    if (single_class) {
        return std::nullopt;
    }

    const Standardizer scaler = Standardizer::fit(node_features);
    const FeatureMatrix standardized = scaler.apply(node_features);
    const std::vector<std::size_t> examples(node_examples.begin(), node_examples.end());

    FeatureMatrix train(static_cast<Eigen::Index>(isolated_set.size()), node_features.cols());
    std::vector<ClassId> labels;
    labels.reserve(isolated_set.size());
    for (std::size_t i = 0; i < isolated_set.size(); ++i) {
        const auto pos = position_of(examples, isolated_set[i].example_id);
        train.row(static_cast<Eigen::Index>(i)) = standardized.row(static_cast<Eigen::Index>(pos));
        labels.push_back(isolated_set[i].label);
    }

    const LogisticConfig lr{config.lr_epochs, config.lr_step, config.lr_l2};
    const auto model = SoftmaxRegression::fit(train, labels, num_classes, lr);
    const std::vector<ClassId> predicted = model.predict(standardized);

    // Compact predicted classes into child indices in class order.
    std::map<ClassId, std::size_t> child_of;
    for (ClassId c : predicted) {
        child_of.emplace(c, 0);
    }
    if (child_of.size() < 2) {
        return std::nullopt;
    }
    std::size_t next = 0;
    for (auto& [cls, child] : child_of) {
        child = next++;
    }
    Partition partition{node, {}, child_of.size()};
    partition.assignment.reserve(predicted.size());
    for (ClassId c : predicted) {
        partition.assignment.push_back(child_of.at(c));
    }
    return partition;
}

std::vector<NodeStats> route_bound_set(const Node& node, const Partition& partition) {
    if (partition.assignment.size() != node.size()) {
        throw CoverageError("partition does not cover the node");
    }
    std::size_t width = partition.num_children;
    for (std::size_t child : partition.assignment) {
        width = std::max(width, child + 1);
    }
    std::vector<std::size_t> members(width, 0);
    for (std::size_t child : partition.assignment) {
        ++members[child];
    }
    std::vector<std::map<ClassId, std::size_t>> tallies(width);
    for (const auto& labeled : node.bound_set()) {
        const auto pos = position_of(node.examples(), labeled.example_id);
        ++tallies[partition.assignment[pos]][labeled.label];
    }
    std::vector<NodeStats> children(width);
    for (std::size_t c = 0; c < width; ++c) {
        children[c].N = members[c];
        for (const auto& [cls, count] : tallies[c]) {
            children[c].n += count;
            children[c].m = std::max(children[c].m, count);
        }
    }
    return children;
}

std::optional<SplitProposal> propose_split(Tree& tree, NodeId leaf, const Dataset& dataset,
                                           const SplitterConfig& config) {
    const Node& node = tree.node(leaf);
    if (!tree.is_leaf(leaf)) {
        throw ContractViolation("propose_split on a non-leaf node");
    }
    if (!node.split_cache()) {
        const FeatureMatrix features = gather_rows(dataset.features, node.examples());
        SplitCache cache;
        if (config.kind == SplitterKind::kmeans2) {
            cache.partition = kmeans_partition(leaf, features, derive_seed(config.seed, leaf.value),
                                               config);
        } else {
            cache.partition = logistic_partition(leaf, features, node.examples(),
                                                 node.isolated_set(), dataset.num_classes, config);
        }
        tree.set_split_cache(leaf, std::move(cache));
    }
    const auto& cached = tree.node(leaf).split_cache()->partition;
    if (!cached) {
        return std::nullopt;
    }
    return SplitProposal{*cached, route_bound_set(tree.node(leaf), *cached)};
}

}  // namespace splitlabel
