#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "splitlabel/assignment.hpp"
#include "splitlabel/bound.hpp"
#include "splitlabel/dataset.hpp"
#include "splitlabel/oracle.hpp"
#include "splitlabel/random.hpp"
#include "splitlabel/splitters.hpp"
#include "splitlabel/tree.hpp"

namespace splitlabel {

struct RunConfig {
    std::size_t budget = 0;
    double training_ratio = 0.5;
    double quality = 0.85;
    SplitterConfig splitter;
    std::size_t min_split_size = 10;
    std::uint64_t seed = 0;
    TernaryOptions bound;
    // Stop as soon as the best available delta is <= 0.
    bool early_stop = false;

    void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);

enum class ActionKind { label, split };

struct Action {
    ActionKind kind = ActionKind::label;
    NodeId node;

    friend bool operator==(const Action&, const Action&) = default;
};

struct LeafScores {
    NodeId node;
    double current = 0.0;
    std::optional<double> label;
    std::optional<double> split;
};

struct Choice {
    Action action;
    double delta = 0.0;
};

// argmax of S_a - S over available (leaf, action) pairs. Ties: label before
// split, then lower node id. nullopt when nothing is available.
std::optional<Choice> select_action(std::span<const LeafScores> scores);

enum class LabelRoute { bound, training };

struct ActionRecord {
    std::size_t step_index = 0;
    Action action;
    double delta = 0.0;
    std::size_t budget_before = 0;
    std::size_t budget_after = 0;
    bool oracle_called = false;
    bool cached_reuse = false;
    std::optional<std::size_t> example_id;
    std::optional<ClassId> label;
    std::optional<LabelRoute> route;
    std::vector<NodeId> children;
    double total_bound_after = 0.0;
    std::optional<std::size_t> true_correct_after;
    std::size_t num_leaves_after = 0;
};

// One JSON-lines metrics record.
nlohmann::json to_json(const ActionRecord& record);

// Example waiting for an external oracle answer.
struct PendingQuery {
    std::size_t example_id = 0;
    NodeId node;
    double delta = 0.0;
};

struct RunFinished {};

// Greedy split/label loop over one dataset. The dataset must
// outlive the engine. Single writer: callers serialize all mutating calls.
class Engine {
public:
    Engine(const RunConfig& config, const Dataset& dataset);

    const RunConfig& config() const noexcept { return config_; }
    const Dataset& dataset() const noexcept { return *dataset_; }
    const Tree& tree() const noexcept { return tree_; }
    std::size_t budget_remaining() const noexcept { return budget_; }
    std::size_t step_index() const noexcept { return step_; }
    std::optional<ClassId> cached_label(std::size_t example_id) const;
    std::size_t cached_count() const noexcept { return cached_count_; }
    const std::optional<PendingQuery>& pending() const noexcept { return pending_; }

    // Per-leaf S, S_label, S_split in leaf-id order. Fills split caches.
    std::vector<LeafScores> compute_scores();

    // Σ over leaves of the maximized bound.
    double total_bound() const;
    // Examples whose oracle label or leaf majority matches truth.
    std::optional<std::size_t> true_correct() const;

    // Runs one step unless it needs a fresh oracle answer. Split actions and
    // cache hits complete immediately (ActionRecord); a fresh example yields
    // PendingQuery and the engine waits for complete_label or abort_label.
    std::variant<ActionRecord, PendingQuery, RunFinished> begin_step();

    // Delivers the oracle's answer for the pending query. Out-of-range
    // classes throw ContractViolation and leave the query pending.
    ActionRecord complete_label(ClassId label);

    // Drops the pending query and rewinds the RNG; nothing is cached or charged.
    void abort_label();

    // begin_step plus a synchronous oracle call. nullopt when the run is complete.
    std::optional<ActionRecord> step(Oracle& oracle);

    LabelAssignment finalize() const;

    // Full engine state (config, tree, cache, RNG, budget, counters).
    nlohmann::json checkpoint() const;
    static Engine restore(const nlohmann::json& doc, const Dataset& dataset);

private:
    ActionRecord execute_split(NodeId leaf, double delta);
    ActionRecord finish_label(NodeId leaf, std::size_t example_id, ClassId label, double delta,
                              bool oracle_called);

    RunConfig config_;
    const Dataset* dataset_;
    Tree tree_;
    std::size_t budget_;
    std::vector<ClassId> label_cache_;  // -1 = never labeled
    std::size_t cached_count_ = 0;
    Rng rng_;
    std::size_t step_ = 0;
    std::optional<PendingQuery> pending_;
    std::string rng_before_pending_;
};

struct RunResult {
    LabelAssignment assignment;
    std::vector<ActionRecord> trace;
    // Set when an oracle failure ended the run early.
    std::optional<std::string> oracle_error;
};

// Steps until the budget is spent or no action remains, then finalizes.
// on_step (optional) sees each record as it is produced.
RunResult run(const RunConfig& config, const Dataset& dataset, Oracle& oracle,
              const std::function<void(const ActionRecord&)>& on_step = {});

}  // namespace splitlabel
