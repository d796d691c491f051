#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "splitlabel/assignment.hpp"
#include "splitlabel/dataset.hpp"
#include "splitlabel/error.hpp"
#include "splitlabel/random.hpp"

namespace splitlabel {
namespace {

CsvOptions labeled(std::optional<std::size_t> num_classes = std::nullopt) {
    CsvOptions o;
    o.label_column = "label";
    o.num_classes = num_classes;
    return o;
}

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("splitlabel_data_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::filesystem::path write(const std::string& name, const std::string& body) {
        const auto path = dir_ / name;
        std::ofstream(path) << body;
        return path;
    }

    std::filesystem::path dir_;
};

using Csv = TempDir;

TEST_F(Csv, LoadsFeaturesAndLabels) {
    const auto path = write("a.csv", "x,label,y\n1.5,2,3\n-4,0,5e-1\n");
    const Dataset d = load_csv(path, labeled());
    EXPECT_EQ(d.size(), 2u);
    EXPECT_EQ(d.dims(), 2u);
    EXPECT_EQ(d.features(0, 0), 1.5);
    EXPECT_EQ(d.features(1, 1), 0.5);
    EXPECT_EQ(*d.truth, (std::vector<ClassId>{2, 0}));
    EXPECT_EQ(d.num_classes, 3u);
}

TEST_F(Csv, WithoutLabelColumn) {
    const auto path = write("b.csv", "x,y\n1,2\n3,4\n");
    const Dataset d = load_csv(path);
    EXPECT_FALSE(d.truth.has_value());
    EXPECT_EQ(d.dims(), 2u);
}

TEST_F(Csv, ErrorsCarryLineNumbers) {
    const auto ragged = write("r.csv", "x,label\n1,0\n2\n");
    try {
        load_csv(ragged, labeled());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
    const auto text = write("t.csv", "x,label\n1,0\nabc,1\n");
    EXPECT_THROW(load_csv(text, labeled()), ParseError);
    const auto fractional = write("f.csv", "x,label\n1,0.5\n");
    EXPECT_THROW(load_csv(fractional, labeled()), ParseError);
    const auto huge = write("h.csv", "x,label\n1,1e20\n");
    EXPECT_THROW(load_csv(huge, labeled()), ParseError);
    const auto negative = write("n.csv", "x,label\n1,-1\n");
    EXPECT_THROW(load_csv(negative, labeled()), ParseError);
    const auto missing = write("m.csv", "x,y\n1,0\n");
    EXPECT_THROW(load_csv(missing, labeled()), ParseError);
    const auto over = write("o.csv", "x,label\n1,4\n");
    EXPECT_THROW(load_csv(over, labeled(3)), ParseError);
}

TEST_F(Csv, WriteThenLoadRoundTrips) {
    const Dataset d = gen_blobs(3, 40, 3, 4, 1.0);
    const auto path = dir_ / "blobs.csv";
    write_csv(d, path);
    const Dataset back = load_csv(path, labeled());
    EXPECT_EQ(*back.truth, *d.truth);
    EXPECT_EQ(back.num_classes, 4u);
    EXPECT_LE((back.features - d.features).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(RenderHint, Parses) {
    EXPECT_EQ(parse_render_hint("28x28"), (RenderHint{28, 28}));
    EXPECT_EQ(parse_render_hint("4X7"), (RenderHint{4, 7}));
    EXPECT_THROW(parse_render_hint("28"), std::invalid_argument);
    EXPECT_THROW(parse_render_hint("0x3"), std::invalid_argument);
    EXPECT_THROW(parse_render_hint("3x3x"), std::invalid_argument);
}

TEST(Generators, BlobsShapeAndBalance) {
    const Dataset d = gen_blobs(1, 300, 2, 3, 1.0);
    EXPECT_EQ(d.size(), 300u);
    EXPECT_EQ(d.dims(), 2u);
    std::vector<int> counts(3, 0);
    for (ClassId c : *d.truth) {
        ++counts[static_cast<std::size_t>(c)];
    }
    EXPECT_EQ(counts, (std::vector<int>{100, 100, 100}));
    EXPECT_EQ(gen_blobs(1, 300, 2, 3, 1.0).features, d.features);
    EXPECT_NE(gen_blobs(2, 300, 2, 3, 1.0).features, d.features);
}

TEST(Generators, NoiseDimsLayout) {
    const Dataset d = gen_noise_dims(1, 200, 2, 10, 4);
    EXPECT_EQ(d.dims(), 12u);
    EXPECT_EQ(d.num_classes, 4u);
    // Noise columns are uniform and bounded; signal columns are not.
    const auto noise = d.features.rightCols(10);
    EXPECT_LE(noise.cwiseAbs().maxCoeff(), 25.0);
    EXPECT_GT(noise.cwiseAbs().maxCoeff(), 20.0);
}

TEST(Rng, ReproducibleAndBounded) {
    Rng a(5);
    Rng b(5);
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.uniform_index(7);
        EXPECT_EQ(x, b.uniform_index(7));
        EXPECT_LT(x, 7u);
        seen.insert(x);
        const double u = a.unit_real();
        EXPECT_EQ(u, b.unit_real());
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, StateRoundTrip) {
    Rng a(9);
    a.next();
    const std::string state = a.save_state();
    const auto expected = a.uniform_index(1000);
    Rng b;
    b.load_state(state);
    EXPECT_EQ(b.uniform_index(1000), expected);
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_EQ(derive_seed(4, 2), derive_seed(4, 2));
}

TEST(LabelExport, RoundTrip) {
    LabelAssignment a;
    a.entries = {{0, LabelSource::oracle, NodeId{3}, 0.9},
                 {std::nullopt, LabelSource::none, NodeId{4}, 1.0 / 3.0},
                 {2, LabelSource::inferred, NodeId{3}, 0.9}};
    const std::string text = export_labels_string(a);
    EXPECT_EQ(text.substr(0, text.find('\n')), "example_id,label,source,node_id,uniformity");
    std::istringstream in(text);
    EXPECT_EQ(parse_label_export(in), a);
}

TEST(LabelExport, EmptyAssignmentIsHeaderOnly) {
    EXPECT_EQ(export_labels_string({}), "example_id,label,source,node_id,uniformity\n");
}

TEST(LabelAssignment, CountsAndAccuracy) {
    LabelAssignment a;
    a.entries = {{0, LabelSource::oracle, NodeId{0}, 1.0},
                 {1, LabelSource::inferred, NodeId{0}, 1.0},
                 {std::nullopt, LabelSource::none, NodeId{0}, 0.0}};
    EXPECT_EQ(a.size_of_y(), 2u);
    EXPECT_EQ(a.count(LabelSource::none), 1u);
    EXPECT_EQ(a.accuracy({0, 0, 1}), 0.5);
    EXPECT_FALSE(LabelAssignment{}.accuracy({}).has_value());
    EXPECT_EQ(parse_label_source("inferred"), LabelSource::inferred);
    EXPECT_THROW(parse_label_source("guess"), std::invalid_argument);
}

}  // namespace
}  // namespace splitlabel
