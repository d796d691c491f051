#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "splitlabel/bound.hpp"

namespace splitlabel {

using ClassId = int;

struct NodeId {
    std::uint64_t value = 0;

    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct LabeledExample {
    std::size_t example_id = 0;
    ClassId label = 0;

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Child index per example, aligned with the node's (sorted) example list.
struct Partition {
    NodeId node;
    std::vector<std::size_t> assignment;
    std::size_t num_children = 0;

    friend bool operator==(const Partition&, const Partition&) = default;
};

// Cached splitter outcome for a node. An empty `partition` records that the
// splitter reported the split as unavailable for the node's current state.
struct SplitCache {
    std::optional<Partition> partition;
};

class Node {
public:
    NodeId id() const noexcept { return id_; }
    std::optional<NodeId> parent() const noexcept { return parent_; }
    const std::vector<NodeId>& children() const noexcept { return children_; }

    // Dataset indices in ascending order.
    const std::vector<std::size_t>& examples() const noexcept { return examples_; }
    std::size_t size() const noexcept { return examples_.size(); }

    std::size_t n() const noexcept { return bound_set_.size(); }
    std::size_t m() const noexcept { return majority_ ? class_counts_[*majority_] : 0; }
    std::optional<ClassId> majority() const noexcept { return majority_; }
    const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }
    NodeStats stats() const noexcept { return {m(), n(), size()}; }

    const std::vector<LabeledExample>& bound_set() const noexcept { return bound_set_; }
    const std::vector<LabeledExample>& isolated_set() const noexcept { return isolated_set_; }

    // Examples not yet placed in either bin, in sampling order.
    const std::vector<std::size_t>& fresh() const noexcept { return fresh_; }
    bool contains(std::size_t example_id) const;
    bool is_consumed(std::size_t example_id) const { return consumed_.contains(example_id); }
    std::size_t consumed_count() const noexcept { return consumed_.size(); }

    const std::optional<SplitCache>& split_cache() const noexcept { return split_cache_; }

private:
    friend class Tree;

    NodeId id_;
    std::optional<NodeId> parent_;
    std::vector<NodeId> children_;
    std::vector<std::size_t> examples_;
    std::vector<std::size_t> fresh_;
    std::unordered_set<std::size_t> consumed_;
    std::vector<std::size_t> class_counts_;
    std::optional<ClassId> majority_;
    std::vector<LabeledExample> bound_set_;
    std::vector<LabeledExample> isolated_set_;
    std::optional<SplitCache> split_cache_;
};

// m/n of a leaf, 0 when nothing has been sampled.
double leaf_uniformity(const Node& node);

class Tree {
public:
    // One leaf holding 0..dataset_size-1. Throws EmptyDatasetError for 0.
    static Tree create_root(std::size_t dataset_size);

    std::size_t dataset_size() const noexcept { return leaf_of_example_.size(); }
    NodeId root() const noexcept { return {0}; }
    const std::set<NodeId>& leaves() const noexcept { return leaves_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    const Node& node(NodeId id) const;
    bool is_leaf(NodeId id) const { return leaves_.contains(id); }
    NodeId leaf_of(std::size_t example_id) const;

    // Counts toward (m, n); invalidates nothing.
    const Node& add_bound_label(NodeId leaf, std::size_t example_id, ClassId label);
    // Goes to the isolated training set; (m, n) untouched; drops the split cache.
    const Node& add_training_label(NodeId leaf, std::size_t example_id, ClassId label);

    // Replaces the leaf by one fresh leaf per nonempty child. Children start
    // with zero counts, empty bins and no cache.
    std::vector<NodeId> apply_split(NodeId leaf, const Partition& partition);

    void set_split_cache(NodeId leaf, SplitCache cache);
    void clear_split_cache(NodeId leaf);

    // Per-leaf {id, N, n, m, majority_class, uniformity}.
    nlohmann::json leaf_summary() const;

    // Full structural serialization (split caches are not persisted).
    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& doc);

private:
    Node& mutable_leaf(NodeId id);
    Node& consume(NodeId leaf, std::size_t example_id);

    std::map<NodeId, Node> nodes_;
    std::set<NodeId> leaves_;
    std::vector<NodeId> leaf_of_example_;
    std::uint64_t next_id_ = 0;
};

}  // namespace splitlabel
