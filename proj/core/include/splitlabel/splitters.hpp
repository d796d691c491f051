#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitlabel/bound.hpp"
#include "splitlabel/dataset.hpp"
#include "splitlabel/tree.hpp"

namespace splitlabel {

enum class SplitterKind { kmeans2, logistic };

std::string to_string(SplitterKind kind);
SplitterKind parse_splitter_kind(const std::string& text);

struct SplitterConfig {
    SplitterKind kind = SplitterKind::logistic;
    std::uint64_t seed = 0;
    std::size_t kmeans_max_iters = 100;
    double kmeans_tol = 1e-6;
    std::size_t lr_epochs = 200;
    double lr_step = 0.1;
    double lr_l2 = 1e-3;
    std::size_t min_train_examples = 5;

    void validate() const;
};

// Two-means partition with k-means++ seeding. nullopt when fewer than two
// examples, all rows identical, or Lloyd's iterations empty a cluster.
std::optional<Partition> kmeans_partition(NodeId node, const FeatureMatrix& node_features,
                                          std::uint64_t seed, const SplitterConfig& config);

// Trains softmax regression on the isolated set only (features standardized
// with node statistics) and groups node examples by predicted class. Empty
// classes are dropped and child indices compacted in class order. nullopt
// when the isolated set is too small, single-class, or every example lands
// in one class.
std::optional<Partition> logistic_partition(NodeId node, const FeatureMatrix& node_features,
                                            std::span<const std::size_t> node_examples,
                                            std::span<const LabeledExample> isolated_set,
                                            std::size_t num_classes,
                                            const SplitterConfig& config);

struct SplitProposal {
    Partition partition;
    std::vector<NodeStats> children;
};

// Routes the node's bound-set labels through a partition: per child (m_u, n_u, N_u).
std::vector<NodeStats> route_bound_set(const Node& node, const Partition& partition);

// Cached proposal for a leaf (splitter runs only on a cache miss); child
// stats are always recomputed from the current bound set.
std::optional<SplitProposal> propose_split(Tree& tree, NodeId leaf, const Dataset& dataset,
                                           const SplitterConfig& config);

}  // namespace splitlabel
