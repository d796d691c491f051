#include "splitlabel/tree.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

std::string describe(NodeId id) { return "node " + std::to_string(id.value); }

void recompute_majority(std::vector<std::size_t>& counts, std::optional<ClassId>& majority) {
    majority.reset();
    std::size_t best = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > best) {
            best = counts[c];
            majority = static_cast<ClassId>(c);
        }
    }
}

nlohmann::json labeled_to_json(const std::vector<LabeledExample>& set) {
    auto out = nlohmann::json::array();
    for (const auto& e : set) {
        out.push_back({e.example_id, e.label});
    }
    return out;
}

std::vector<LabeledExample> labeled_from_json(const nlohmann::json& doc) {
    std::vector<LabeledExample> out;
    for (const auto& e : doc) {
        out.push_back({e.at(0).get<std::size_t>(), e.at(1).get<ClassId>()});
    }
    return out;
}

}  // namespace

bool Node::contains(std::size_t example_id) const {
    return std::binary_search(examples_.begin(), examples_.end(), example_id);
}

double leaf_uniformity(const Node& node) {
    if (node.n() == 0) {
        return 0.0;
    }
    return static_cast<double>(node.m()) / static_cast<double>(node.n());
}

Tree Tree::create_root(std::size_t dataset_size) {
    if (dataset_size == 0) {
        throw EmptyDatasetError("cannot build a tree over an empty dataset");
    }
    Tree tree;
    Node root;
    root.id_ = NodeId{tree.next_id_++};
    root.examples_.resize(dataset_size);
    for (std::size_t i = 0; i < dataset_size; ++i) {
        root.examples_[i] = i;
    }
    root.fresh_ = root.examples_;
    tree.leaf_of_example_.assign(dataset_size, root.id_);
    tree.leaves_.insert(root.id_);
    tree.nodes_.emplace(root.id_, std::move(root));
    return tree;
}

const Node& Tree::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw ContractViolation("unknown " + describe(id));
    }
    return it->second;
}

NodeId Tree::leaf_of(std::size_t example_id) const {
    if (example_id >= leaf_of_example_.size()) {
        throw MembershipError("example " + std::to_string(example_id) + " outside the dataset");
    }
    return leaf_of_example_[example_id];
}

Node& Tree::mutable_leaf(NodeId id) {
    if (!leaves_.contains(id)) {
        throw ContractViolation(describe(id) + " is not a leaf");
    }
    return nodes_.at(id);
}

Node& Tree::consume(NodeId leaf, std::size_t example_id) {
    Node& node = mutable_leaf(leaf);
    if (!node.contains(example_id)) {
        throw MembershipError("example " + std::to_string(example_id) + " is not in " +
                              describe(leaf));
    }
    if (node.consumed_.contains(example_id)) {
        throw DoubleConsumptionError("example " + std::to_string(example_id) +
                                     " already consumed in " + describe(leaf));
    }
    auto pos = std::find(node.fresh_.begin(), node.fresh_.end(), example_id);
    *pos = node.fresh_.back();
    node.fresh_.pop_back();
    node.consumed_.insert(example_id);
    return node;
}

const Node& Tree::add_bound_label(NodeId leaf, std::size_t example_id, ClassId label) {
    if (label < 0) {
        throw ContractViolation("negative class id");
    }
    Node& node = consume(leaf, example_id);
    const auto cls = static_cast<std::size_t>(label);
    if (node.class_counts_.size() <= cls) {
        node.class_counts_.resize(cls + 1, 0);
    }
    ++node.class_counts_[cls];
    node.bound_set_.push_back({example_id, label});
    recompute_majority(node.class_counts_, node.majority_);
    return node;
}

const Node& Tree::add_training_label(NodeId leaf, std::size_t example_id, ClassId label) {
    if (label < 0) {
        throw ContractViolation("negative class id");
    }
    Node& node = consume(leaf, example_id);
    node.isolated_set_.push_back({example_id, label});
    node.split_cache_.reset();
    return node;
}

std::vector<NodeId> Tree::apply_split(NodeId leaf, const Partition& partition) {
    Node& parent = mutable_leaf(leaf);
    if (partition.node != leaf) {
        throw ContractViolation("partition belongs to " + describe(partition.node) + ", not " +
                                describe(leaf));
    }
    if (partition.assignment.size() != parent.size()) {
        throw CoverageError("partition covers " + std::to_string(partition.assignment.size()) +
                            " examples but " + describe(leaf) + " holds " +
                            std::to_string(parent.size()));
    }
    std::size_t width = 0;
    for (std::size_t child : partition.assignment) {
        width = std::max(width, child + 1);
    }
    std::vector<std::vector<std::size_t>> members(width);
    for (std::size_t i = 0; i < parent.examples_.size(); ++i) {
        members[partition.assignment[i]].push_back(parent.examples_[i]);
    }
    const auto nonempty = std::count_if(members.begin(), members.end(),
                                        [](const auto& m) { return !m.empty(); });
    if (nonempty < 2) {
        throw DegenerateSplitError(describe(leaf) + " split has fewer than two nonempty children");
    }

    std::vector<NodeId> created;
    for (auto& group : members) {
        if (group.empty()) {
            continue;
        }
        Node child;
        child.id_ = NodeId{next_id_++};
        child.parent_ = leaf;
        child.examples_ = std::move(group);
        child.fresh_ = child.examples_;
        for (std::size_t e : child.examples_) {
            leaf_of_example_[e] = child.id_;
        }
        created.push_back(child.id_);
        leaves_.insert(child.id_);
        nodes_.emplace(child.id_, std::move(child));
    }
    Node& parent_again = nodes_.at(leaf);
    parent_again.children_ = created;
    parent_again.split_cache_.reset();
    leaves_.erase(leaf);
    return created;
}

void Tree::set_split_cache(NodeId leaf, SplitCache cache) {
    mutable_leaf(leaf).split_cache_ = std::move(cache);
}

void Tree::clear_split_cache(NodeId leaf) { mutable_leaf(leaf).split_cache_.reset(); }

nlohmann::json Tree::leaf_summary() const {
    auto out = nlohmann::json::array();
    for (NodeId id : leaves_) {
        const Node& node = nodes_.at(id);
        out.push_back({{"id", id.value},
                       {"N", node.size()},
                       {"n", node.n()},
                       {"m", node.m()},
                       {"majority_class", node.majority() ? nlohmann::json(*node.majority())
                                                          : nlohmann::json(nullptr)},
                       {"uniformity", leaf_uniformity(node)}});
    }
    return out;
}

nlohmann::json Tree::to_json() const {
    auto nodes = nlohmann::json::array();
    for (const auto& [id, node] : nodes_) {
        auto children = nlohmann::json::array();
        for (NodeId c : node.children_) {
            children.push_back(c.value);
        }
        nodes.push_back({{"id", id.value},
                         {"parent", node.parent_ ? nlohmann::json(node.parent_->value)
                                                 : nlohmann::json(nullptr)},
                         {"children", children},
                         {"examples", node.examples_},
                         {"fresh", node.fresh_},
                         {"bound_set", labeled_to_json(node.bound_set_)},
                         {"isolated_set", labeled_to_json(node.isolated_set_)}});
    }
    return {{"dataset_size", dataset_size()}, {"next_id", next_id_}, {"nodes", nodes}};
}

Tree Tree::from_json(const nlohmann::json& doc) {
    Tree tree;
    tree.next_id_ = doc.at("next_id").get<std::uint64_t>();
    tree.leaf_of_example_.assign(doc.at("dataset_size").get<std::size_t>(), NodeId{});
    for (const auto& entry : doc.at("nodes")) {
        Node node;
        node.id_ = NodeId{entry.at("id").get<std::uint64_t>()};
        if (!entry.at("parent").is_null()) {
            node.parent_ = NodeId{entry.at("parent").get<std::uint64_t>()};
        }
        for (const auto& c : entry.at("children")) {
            node.children_.push_back(NodeId{c.get<std::uint64_t>()});
        }
        node.examples_ = entry.at("examples").get<std::vector<std::size_t>>();
        node.fresh_ = entry.at("fresh").get<std::vector<std::size_t>>();
        node.bound_set_ = labeled_from_json(entry.at("bound_set"));
        node.isolated_set_ = labeled_from_json(entry.at("isolated_set"));
        for (const auto& e : node.bound_set_) {
            node.consumed_.insert(e.example_id);
            const auto cls = static_cast<std::size_t>(e.label);
            if (node.class_counts_.size() <= cls) {
                node.class_counts_.resize(cls + 1, 0);
            }
            ++node.class_counts_[cls];
        }
        for (const auto& e : node.isolated_set_) {
            node.consumed_.insert(e.example_id);
        }
        recompute_majority(node.class_counts_, node.majority_);
        if (node.children_.empty()) {
            tree.leaves_.insert(node.id_);
            for (std::size_t e : node.examples_) {
                tree.leaf_of_example_.at(e) = node.id_;
            }
        }
        tree.nodes_.emplace(node.id_, std::move(node));
    }
    return tree;
}

}  // namespace splitlabel
