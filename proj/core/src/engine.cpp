#include "splitlabel/engine.hpp"

#include <nlohmann/json.hpp>

#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

constexpr int kMaxOracleAsks = 3;

std::string to_string(ActionKind kind) { return kind == ActionKind::label ? "label" : "split"; }

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

// Strict "a beats b" ordering for select_action.
bool better(double delta, ActionKind kind, NodeId node, const Choice& incumbent) {
    if (delta != incumbent.delta) {
        return delta > incumbent.delta;
    }
    if (kind != incumbent.action.kind) {
        return kind == ActionKind::label;
    }
    return node < incumbent.action.node;
}

}  // namespace

void RunConfig::validate() const {
    if (!(training_ratio >= 0.0 && training_ratio <= 1.0)) {
        throw ContractViolation("training_ratio must lie in [0, 1]");
    }
    if (!(quality >= 0.0 && quality <= 1.0)) {
        throw ContractViolation("quality must lie in [0, 1]");
    }
    if (min_split_size < 2) {
        throw ContractViolation("min_split_size must be >= 2");
    }
    if (!(bound.bracket_tolerance > 0.0) || bound.max_iterations < 1) {
        throw ContractViolation("bound tolerance must be > 0 with at least one iteration");
    }
    splitter.validate();
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"budget", c.budget},
            {"training_ratio", c.training_ratio},
            {"quality", c.quality},
            {"min_split_size", c.min_split_size},
            {"seed", c.seed},
            {"early_stop", c.early_stop},
            {"bound_tolerance", c.bound.bracket_tolerance},
            {"bound_max_iterations", c.bound.max_iterations},
            {"splitter",
             {{"kind", to_string(c.splitter.kind)},
              {"seed", c.splitter.seed},
              {"kmeans_max_iters", c.splitter.kmeans_max_iters},
              {"kmeans_tol", c.splitter.kmeans_tol},
              {"lr_epochs", c.splitter.lr_epochs},
              {"lr_step", c.splitter.lr_step},
              {"lr_l2", c.splitter.lr_l2},
              {"min_train_examples", c.splitter.min_train_examples}}}};
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("run config must be a JSON object");
    }
    RunConfig c;
    bool splitter_seed_given = false;
    for (const auto& [key, value] : doc.items()) {
        if (key == "budget") {
            c.budget = value.get<std::size_t>();
        } else if (key == "training_ratio") {
            c.training_ratio = value.get<double>();
        } else if (key == "quality") {
            c.quality = value.get<double>();
        } else if (key == "min_split_size") {
            c.min_split_size = value.get<std::size_t>();
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "early_stop") {
            c.early_stop = value.get<bool>();
        } else if (key == "bound_tolerance") {
            c.bound.bracket_tolerance = value.get<double>();
        } else if (key == "bound_max_iterations") {
            c.bound.max_iterations = value.get<int>();
        } else if (key == "splitter") {
            for (const auto& [skey, svalue] : value.items()) {
                if (skey == "kind") {
                    c.splitter.kind = parse_splitter_kind(svalue.get<std::string>());
                } else if (skey == "seed") {
                    c.splitter.seed = svalue.get<std::uint64_t>();
                    splitter_seed_given = true;
                } else if (skey == "kmeans_max_iters") {
                    c.splitter.kmeans_max_iters = svalue.get<std::size_t>();
                } else if (skey == "kmeans_tol") {
                    c.splitter.kmeans_tol = svalue.get<double>();
                } else if (skey == "lr_epochs") {
                    c.splitter.lr_epochs = svalue.get<std::size_t>();
                } else if (skey == "lr_step") {
                    c.splitter.lr_step = svalue.get<double>();
                } else if (skey == "lr_l2") {
                    c.splitter.lr_l2 = svalue.get<double>();
                } else if (skey == "min_train_examples") {
                    c.splitter.min_train_examples = svalue.get<std::size_t>();
                } else {
                    throw std::invalid_argument("unknown splitter key '" + skey + "'");
                }
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    if (!splitter_seed_given) {
        c.splitter.seed = c.seed;
    }
    c.validate();
    return c;
}

std::optional<Choice> select_action(std::span<const LeafScores> scores) {
    std::optional<Choice> best;
    auto consider = [&](const LeafScores& leaf, ActionKind kind, double anticipated) {
        const double delta = anticipated - leaf.current;
        if (!best || better(delta, kind, leaf.node, *best)) {
            best = Choice{{kind, leaf.node}, delta};
        }
    };
    for (const LeafScores& leaf : scores) {
        if (leaf.label) {
            consider(leaf, ActionKind::label, *leaf.label);
        }
        if (leaf.split) {
            consider(leaf, ActionKind::split, *leaf.split);
        }
    }
    return best;
}

nlohmann::json to_json(const ActionRecord& r) {
    auto children = nlohmann::json::array();
    for (NodeId c : r.children) {
        children.push_back(c.value);
    }
    nlohmann::json route = nullptr;
    if (r.route) {
        route = *r.route == LabelRoute::bound ? "bound" : "training";
    }
    return {{"step", r.step_index},
            {"action", to_string(r.action.kind)},
            {"node", r.action.node.value},
            {"delta", r.delta},
            {"budget_before", r.budget_before},
            {"budget_after", r.budget_after},
            {"oracle_called", r.oracle_called},
            {"cached_reuse", r.cached_reuse},
            {"example_id", optional_json(r.example_id)},
            {"class", optional_json(r.label)},
            {"route", route},
            {"children", children},
            {"total_bound_after", r.total_bound_after},
            {"true_correct_after", optional_json(r.true_correct_after)},
            {"num_leaves_after", r.num_leaves_after}};
}

Engine::Engine(const RunConfig& config, const Dataset& dataset)
    : config_(config),
      dataset_(&dataset),
      tree_(Tree::create_root(dataset.size())),
      budget_(config.budget),
      label_cache_(dataset.size(), -1),
      rng_(config.seed) {
    config_.validate();
    dataset.validate();
}

std::optional<ClassId> Engine::cached_label(std::size_t example_id) const {
    const ClassId c = label_cache_.at(example_id);
    return c < 0 ? std::nullopt : std::optional<ClassId>(c);
}

std::vector<LeafScores> Engine::compute_scores() {
    std::vector<LeafScores> scores;
    scores.reserve(tree_.leaves().size());
    for (NodeId id : tree_.leaves()) {
        const Node& leaf = tree_.node(id);
        LeafScores s;
        s.node = id;
        s.current = maximize_bound(leaf.stats(), config_.bound).value;
        if (!leaf.fresh().empty()) {
            s.label = score_label(leaf.stats(), config_.bound);
        }
        if (leaf.size() >= config_.min_split_size) {
            if (auto proposal = propose_split(tree_, id, *dataset_, config_.splitter)) {
                s.split = score_split(proposal->children, config_.bound);
            }
        }
        scores.push_back(s);
    }
    return scores;
}

double Engine::total_bound() const {
    double total = 0.0;
    for (NodeId id : tree_.leaves()) {
        total += maximize_bound(tree_.node(id).stats(), config_.bound).value;
    }
    return total;
}

std::optional<std::size_t> Engine::true_correct() const {
    if (!dataset_->truth) {
        return std::nullopt;
    }
    const auto& truth = *dataset_->truth;
    std::size_t correct = 0;
    for (NodeId id : tree_.leaves()) {
        const Node& leaf = tree_.node(id);
        const ClassId majority = leaf.majority().value_or(-1);
        for (std::size_t e : leaf.examples()) {
            const ClassId predicted = label_cache_[e] >= 0 ? label_cache_[e] : majority;
            correct += predicted == truth[e] ? 1 : 0;
        }
    }
    return correct;
}

std::variant<ActionRecord, PendingQuery, RunFinished> Engine::begin_step() {
    if (pending_) {
        throw ContractViolation("an oracle query is already pending");
    }
    if (budget_ == 0) {
        return RunFinished{};
    }
    const auto scores = compute_scores();
    const auto choice = select_action(scores);
    if (!choice || (config_.early_stop && choice->delta <= 0.0)) {
        return RunFinished{};
    }
    if (choice->action.kind == ActionKind::split) {
        return execute_split(choice->action.node, choice->delta);
    }

    const NodeId leaf = choice->action.node;
    const auto& fresh = tree_.node(leaf).fresh();
    std::string rng_before = rng_.save_state();
    const std::size_t example = fresh[rng_.uniform_index(fresh.size())];
    if (label_cache_[example] >= 0) {
        return finish_label(leaf, example, label_cache_[example], choice->delta, false);
    }
    pending_ = PendingQuery{example, leaf, choice->delta};
    rng_before_pending_ = std::move(rng_before);
    return *pending_;
}

ActionRecord Engine::complete_label(ClassId label) {
    if (!pending_) {
        throw ContractViolation("no oracle query is pending");
    }
    if (label < 0 || static_cast<std::size_t>(label) >= dataset_->num_classes) {
        throw ContractViolation("class " + std::to_string(label) + " outside [0, " +
                                std::to_string(dataset_->num_classes) + ")");
    }
    const PendingQuery query = *pending_;
    pending_.reset();
    rng_before_pending_.clear();
    return finish_label(query.node, query.example_id, label, query.delta, true);
}

void Engine::abort_label() {
    if (!pending_) {
        return;
    }
    rng_.load_state(rng_before_pending_);
    pending_.reset();
    rng_before_pending_.clear();
}

std::optional<ActionRecord> Engine::step(Oracle& oracle) {
    auto outcome = begin_step();
    if (std::holds_alternative<RunFinished>(outcome)) {
        return std::nullopt;
    }
    if (auto* record = std::get_if<ActionRecord>(&outcome)) {
        return std::move(*record);
    }
    const auto query = std::get<PendingQuery>(outcome);
    try {
        for (int attempt = 0; attempt < kMaxOracleAsks; ++attempt) {
            const ClassId answer = oracle.query(query.example_id, dataset_->row(query.example_id));
            if (answer >= 0 && static_cast<std::size_t>(answer) < dataset_->num_classes) {
                return complete_label(answer);
            }
        }
    } catch (...) {
        abort_label();
        throw;
    }
    abort_label();
    throw OracleError("oracle kept answering outside [0, C) for example " +
                      std::to_string(query.example_id));
}

ActionRecord Engine::finish_label(NodeId leaf, std::size_t example_id, ClassId label,
                                  double delta, bool oracle_called) {
    ActionRecord record;
    record.step_index = step_;
    record.action = {ActionKind::label, leaf};
    record.delta = delta;
    record.budget_before = budget_;
    record.oracle_called = oracle_called;
    record.cached_reuse = !oracle_called;
    record.example_id = example_id;
    record.label = label;

    if (oracle_called) {
        label_cache_[example_id] = label;
        ++cached_count_;
        --budget_;
    }
    const bool to_training = rng_.unit_real() < config_.training_ratio;
    if (to_training) {
        tree_.add_training_label(leaf, example_id, label);
        record.route = LabelRoute::training;
    } else {
        tree_.add_bound_label(leaf, example_id, label);
        record.route = LabelRoute::bound;
    }
    ++step_;

    record.budget_after = budget_;
    record.total_bound_after = total_bound();
    record.true_correct_after = true_correct();
    record.num_leaves_after = tree_.leaves().size();
    return record;
}

ActionRecord Engine::execute_split(NodeId leaf, double delta) {
    const auto proposal = propose_split(tree_, leaf, *dataset_, config_.splitter);
    if (!proposal) {
        // Scoring and execution happen back to back under one writer.
        throw ContractViolation("split proposal vanished between scoring and execution");
    }
    ActionRecord record;
    record.step_index = step_;
    record.action = {ActionKind::split, leaf};
    record.delta = delta;
    record.budget_before = budget_;
    record.children = tree_.apply_split(leaf, proposal->partition);
    ++step_;

    record.budget_after = budget_;
    record.total_bound_after = total_bound();
    record.true_correct_after = true_correct();
    record.num_leaves_after = tree_.leaves().size();
    return record;
}

LabelAssignment Engine::finalize() const {
    LabelAssignment out;
    out.entries.resize(dataset_->size());
    for (NodeId id : tree_.leaves()) {
        const Node& leaf = tree_.node(id);
        const double uniformity = leaf_uniformity(leaf);
        const bool passes = leaf.majority() && uniformity > config_.quality;
        for (std::size_t e : leaf.examples()) {
            ExampleLabel& entry = out.entries[e];
            entry.node = id;
            entry.uniformity = uniformity;
            if (label_cache_[e] >= 0) {
                entry.label = label_cache_[e];
                entry.source = LabelSource::oracle;
            } else if (passes) {
                entry.label = leaf.majority();
                entry.source = LabelSource::inferred;
            }
        }
    }
    return out;
}

nlohmann::json Engine::checkpoint() const {
    auto cache = nlohmann::json::array();
    for (std::size_t e = 0; e < label_cache_.size(); ++e) {
        if (label_cache_[e] >= 0) {
            cache.push_back({e, label_cache_[e]});
        }
    }
    // A pending query is not persisted: the RNG is rewound so the next
    // begin_step re-derives the same query.
    return {{"config", to_json(config_)},
            {"tree", tree_.to_json()},
            {"budget_remaining", budget_},
            {"label_cache", cache},
            {"rng", pending_ ? rng_before_pending_ : rng_.save_state()},
            {"step_index", step_}};
}

Engine Engine::restore(const nlohmann::json& doc, const Dataset& dataset) {
    Engine engine(run_config_from_json(doc.at("config")), dataset);
    engine.tree_ = Tree::from_json(doc.at("tree"));
    if (engine.tree_.dataset_size() != dataset.size()) {
        throw ContractViolation("checkpoint was taken on a dataset of a different size");
    }
    engine.budget_ = doc.at("budget_remaining").get<std::size_t>();
    for (const auto& pair : doc.at("label_cache")) {
        engine.label_cache_.at(pair.at(0).get<std::size_t>()) = pair.at(1).get<ClassId>();
        ++engine.cached_count_;
    }
    engine.rng_.load_state(doc.at("rng").get<std::string>());
    engine.step_ = doc.at("step_index").get<std::size_t>();
    return engine;
}

RunResult run(const RunConfig& config, const Dataset& dataset, Oracle& oracle,
              const std::function<void(const ActionRecord&)>& on_step) {
    if (dataset.size() == 0) {
        throw EmptyDatasetError("run needs a nonempty dataset");
    }
    Engine engine(config, dataset);
    RunResult result;
    try {
        while (auto record = engine.step(oracle)) {
            if (on_step) {
                on_step(*record);
            }
            result.trace.push_back(std::move(*record));
        }
    } catch (const OracleError& e) {
        result.oracle_error = e.what();
    }
    result.assignment = engine.finalize();
    return result;
}

}  // namespace splitlabel
