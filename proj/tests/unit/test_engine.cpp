#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "splitlabel/bound.hpp"
#include "splitlabel/engine.hpp"
#include "splitlabel/error.hpp"
#include "support/replay.hpp"

namespace splitlabel {
namespace {

RunConfig config_with(std::size_t budget, std::uint64_t seed = 1) {
    RunConfig c;
    c.budget = budget;
    c.seed = seed;
    c.splitter.seed = seed;
    return c;
}

Dataset one_class(std::size_t n) {
    Dataset d;
    d.features = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        d.features(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i);
    }
    d.truth = std::vector<ClassId>(n, 0);
    return d;
}

class FixedOracle : public Oracle {
public:
    explicit FixedOracle(std::vector<ClassId> answers) : answers_(std::move(answers)) {}
    ClassId query(std::size_t, std::span<const double>) override {
        const ClassId a = answers_[std::min(calls_, answers_.size() - 1)];
        ++calls_;
        return a;
    }
    std::size_t calls_ = 0;

private:
    std::vector<ClassId> answers_;
};

class FailingOracle : public Oracle {
public:
    explicit FailingOracle(std::size_t fail_at) : fail_at_(fail_at) {}
    ClassId query(std::size_t example_id, std::span<const double>) override {
        if (calls_++ == fail_at_) {
            throw OracleError("labeler went away");
        }
        return static_cast<ClassId>(example_id % 2);
    }

private:
    std::size_t fail_at_;
    std::size_t calls_ = 0;
};

TEST(SelectAction, PicksLargestDelta) {
    const std::vector<LeafScores> scores{{NodeId{0}, 1.0, 4.2, std::nullopt},
                                         {NodeId{1}, 0.0, 2.0, 5.0}};
    const auto c = select_action(scores);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(c->action, (Action{ActionKind::split, NodeId{1}}));
    EXPECT_DOUBLE_EQ(c->delta, 5.0);
}

TEST(SelectAction, LabelWinsTiesThenLowerNode) {
    const std::vector<LeafScores> same_leaf{{NodeId{3}, 1.0, 3.0, 3.0}};
    EXPECT_EQ(select_action(same_leaf)->action.kind, ActionKind::label);
    const std::vector<LeafScores> two_leaves{{NodeId{2}, 0.0, std::nullopt, 2.0},
                                             {NodeId{5}, 0.0, 2.0, std::nullopt}};
    EXPECT_EQ(select_action(two_leaves)->action, (Action{ActionKind::label, NodeId{5}}));
    const std::vector<LeafScores> splits{{NodeId{2}, 0.0, std::nullopt, 2.0},
                                         {NodeId{5}, 0.0, std::nullopt, 2.0}};
    EXPECT_EQ(select_action(splits)->action.node, NodeId{2});
}

TEST(SelectAction, NegativeDeltaStillChosen) {
    const std::vector<LeafScores> scores{{NodeId{0}, 5.0, 4.9, std::nullopt}};
    EXPECT_NEAR(select_action(scores)->delta, -0.1, 1e-12);
    const std::vector<LeafScores> none{{NodeId{0}, 5.0, std::nullopt, std::nullopt}};
    EXPECT_FALSE(select_action(none).has_value());
}

TEST(Engine, FreshRootScores) {
    const Dataset d = gen_blobs(1, 100, 2, 2, 1.0);
    Engine engine(config_with(10), d);
    const auto scores = engine.compute_scores();
    ASSERT_EQ(scores.size(), 1u);
    EXPECT_EQ(scores[0].current, 0.0);
    EXPECT_NEAR(*scores[0].label, maximize_bound({1, 1, 100}).value, 1e-12);
    EXPECT_FALSE(scores[0].split.has_value());
}

TEST(Engine, UnsupervisedRootCanSplitImmediately) {
    const Dataset d = gen_blobs(1, 100, 2, 2, 1.0);
    RunConfig c = config_with(10);
    c.splitter.kind = SplitterKind::kmeans2;
    Engine engine(c, d);
    const auto scores = engine.compute_scores();
    ASSERT_TRUE(scores[0].split.has_value());
    EXPECT_EQ(*scores[0].split, 0.0);
}

TEST(Engine, ZeroBudgetFinalizesEmpty) {
    const Dataset d = gen_blobs(2, 50, 2, 2, 1.0);
    SimulatedOracle oracle(d);
    const auto result = run(config_with(0), d, oracle);
    EXPECT_TRUE(result.trace.empty());
    EXPECT_EQ(result.assignment.size_of_y(), 0u);
    EXPECT_EQ(result.assignment.entries.size(), 50u);
}

TEST(Engine, ExhaustiveBudgetLabelsEverything) {
    const Dataset d = one_class(30);
    SimulatedOracle oracle(d);
    RunConfig c = config_with(100);
    c.training_ratio = 0.0;
    const auto result = run(c, d, oracle);
    EXPECT_EQ(oracle.calls(), 30u);
    EXPECT_EQ(result.assignment.count(LabelSource::oracle), 30u);
    EXPECT_EQ(result.assignment.accuracy(*d.truth), 1.0);
}

TEST(Engine, TrainingRatioBoundaries) {
    const Dataset d = gen_blobs(3, 60, 2, 2, 1.0);
    for (double r : {0.0, 1.0}) {
        RunConfig c = config_with(15);
        c.training_ratio = r;
        c.min_split_size = 1000;
        SimulatedOracle oracle(d);
        const auto result = run(c, d, oracle);
        for (const auto& rec : result.trace) {
            ASSERT_TRUE(rec.route.has_value());
            EXPECT_EQ(*rec.route, r == 0.0 ? LabelRoute::bound : LabelRoute::training);
        }
        if (r == 1.0) {
            EXPECT_EQ(result.trace.back().total_bound_after, 0.0);
        }
    }
}

TEST(Engine, ReplayInvariantsHold) {
    const Dataset d = gen_blobs(4, 300, 2, 3, 1.5);
    for (auto kind : {SplitterKind::logistic, SplitterKind::kmeans2}) {
        RunConfig c = config_with(60, 5);
        c.splitter.kind = kind;
        const auto report = testing::replay_check(c, d, 200);
        EXPECT_TRUE(report.ok()) << report.first_error;
    }
}

TEST(Engine, CachedReuseAfterSplitIsFree) {
    const Dataset d = gen_blobs(5, 12, 2, 2, 1.0);
    RunConfig c = config_with(12, 2);
    c.splitter.kind = SplitterKind::kmeans2;
    c.training_ratio = 0.0;
    SimulatedOracle oracle(d);
    const auto result = run(c, d, oracle);
    bool saw_reuse = false;
    for (const auto& rec : result.trace) {
        if (rec.cached_reuse) {
            saw_reuse = true;
            EXPECT_FALSE(rec.oracle_called);
            EXPECT_EQ(rec.budget_after, rec.budget_before);
        }
    }
    EXPECT_TRUE(saw_reuse);
    EXPECT_EQ(oracle.calls(), 12u);
}

TEST(Engine, DeterministicTraces) {
    const Dataset d = gen_blobs(6, 200, 3, 3, 2.0);
    const RunConfig c = config_with(50, 9);
    SimulatedOracle a(d);
    SimulatedOracle b(d);
    const auto ra = run(c, d, a);
    const auto rb = run(c, d, b);
    ASSERT_EQ(ra.trace.size(), rb.trace.size());
    for (std::size_t i = 0; i < ra.trace.size(); ++i) {
        EXPECT_EQ(to_json(ra.trace[i]).dump(), to_json(rb.trace[i]).dump());
    }
    EXPECT_EQ(ra.assignment, rb.assignment);
}

TEST(Engine, FinalizeRespectsQualityGate) {
    const Dataset d = gen_blobs(7, 100, 2, 2, 1.0);
    RunConfig c = config_with(40, 3);
    c.min_split_size = 1000;
    c.training_ratio = 0.0;
    SimulatedOracle oracle(d);
    const auto result = run(c, d, oracle);
    // One leaf with two balanced classes: uniformity near 0.5, below q.
    EXPECT_EQ(result.assignment.count(LabelSource::inferred), 0u);
    EXPECT_EQ(result.assignment.count(LabelSource::oracle), 40u);
    for (const auto& e : result.assignment.entries) {
        if (e.source == LabelSource::inferred) {
            EXPECT_GT(e.uniformity, c.quality);
        }
    }
}

TEST(Engine, FinalizeInfersFromUniformLeaf) {
    const Dataset d = one_class(50);
    RunConfig c = config_with(5);
    c.training_ratio = 0.0;
    SimulatedOracle oracle(d);
    const auto result = run(c, d, oracle);
    EXPECT_EQ(result.assignment.count(LabelSource::oracle), 5u);
    EXPECT_EQ(result.assignment.count(LabelSource::inferred), 45u);
    for (const auto& e : result.assignment.entries) {
        EXPECT_EQ(e.label, 0);
        EXPECT_EQ(e.uniformity, 1.0);
    }
}

TEST(Engine, OutOfRangeAnswerKeepsQueryPending) {
    const Dataset d = gen_blobs(8, 40, 2, 2, 1.0);
    Engine engine(config_with(5), d);
    const auto outcome = engine.begin_step();
    ASSERT_TRUE(std::holds_alternative<PendingQuery>(outcome));
    EXPECT_THROW(engine.complete_label(2), ContractViolation);
    EXPECT_THROW(engine.complete_label(-1), ContractViolation);
    ASSERT_TRUE(engine.pending().has_value());
    EXPECT_EQ(engine.budget_remaining(), 5u);
    const auto rec = engine.complete_label(1);
    EXPECT_EQ(engine.budget_remaining(), 4u);
    EXPECT_EQ(rec.label, 1);
    EXPECT_THROW(engine.complete_label(1), ContractViolation);
}

TEST(Engine, AbortRewindsToSameQuery) {
    const Dataset d = gen_blobs(9, 40, 2, 2, 1.0);
    Engine engine(config_with(5), d);
    const auto first = std::get<PendingQuery>(engine.begin_step());
    engine.abort_label();
    EXPECT_EQ(engine.budget_remaining(), 5u);
    EXPECT_FALSE(engine.cached_label(first.example_id).has_value());
    const auto again = std::get<PendingQuery>(engine.begin_step());
    EXPECT_EQ(again.example_id, first.example_id);
}

TEST(Engine, InvalidOracleAnswersAreReasked) {
    const Dataset d = gen_blobs(10, 40, 2, 2, 1.0);
    Engine engine(config_with(5), d);
    FixedOracle oracle({7, 1});
    const auto rec = engine.step(oracle);
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->label, 1);
    EXPECT_EQ(oracle.calls_, 2u);

    Engine stubborn(config_with(5), d);
    FixedOracle bad({9});
    EXPECT_THROW(stubborn.step(bad), OracleError);
    EXPECT_EQ(stubborn.budget_remaining(), 5u);
    EXPECT_FALSE(stubborn.pending().has_value());
}

TEST(Engine, OracleFailureEndsRunGracefully) {
    const Dataset d = gen_blobs(11, 60, 2, 2, 1.0);
    FailingOracle oracle(3);
    const auto result = run(config_with(20), d, oracle);
    ASSERT_TRUE(result.oracle_error.has_value());
    EXPECT_EQ(result.trace.size(), 3u);
    EXPECT_EQ(result.assignment.count(LabelSource::oracle), 3u);
}

TEST(Engine, CheckpointResumesIdentically) {
    const Dataset d = gen_blobs(12, 150, 2, 3, 1.5);
    const RunConfig c = config_with(40, 4);
    SimulatedOracle oracle(d);
    Engine straight(c, d);
    Engine resumed(c, d);
    for (int i = 0; i < 15; ++i) {
        straight.step(oracle);
        resumed.step(oracle);
    }
    resumed = Engine::restore(nlohmann::json::parse(resumed.checkpoint().dump()), d);
    while (true) {
        const auto a = straight.step(oracle);
        const auto b = resumed.step(oracle);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (!a) {
            break;
        }
        EXPECT_EQ(to_json(*a).dump(), to_json(*b).dump());
    }
    EXPECT_EQ(straight.finalize(), resumed.finalize());
}

TEST(RunConfig, JsonRoundTripAndValidation) {
    RunConfig c = config_with(12, 3);
    c.training_ratio = 0.25;
    c.splitter.kind = SplitterKind::kmeans2;
    const RunConfig back = run_config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_THROW(run_config_from_json({{"budgt", 3}}), std::invalid_argument);
    EXPECT_THROW(run_config_from_json({{"training_ratio", 1.5}}), ContractViolation);
    EXPECT_THROW(run_config_from_json({{"min_split_size", 1}}), ContractViolation);
    EXPECT_EQ(run_config_from_json({{"seed", 8}}).splitter.seed, 8u);
}

TEST(ActionRecord, JsonKeys) {
    const Dataset d = gen_blobs(13, 30, 2, 2, 1.0);
    SimulatedOracle oracle(d);
    const auto result = run(config_with(1), d, oracle);
    ASSERT_EQ(result.trace.size(), 1u);
    const auto j = to_json(result.trace[0]);
    for (const char* key : {"step", "action", "node", "delta", "budget_before", "budget_after",
                            "oracle_called", "cached_reuse", "example_id", "class", "route",
                            "total_bound_after", "true_correct_after", "num_leaves_after"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["action"], "label");
    EXPECT_EQ(j["budget_after"], 0);
}

}  // namespace
}  // namespace splitlabel
