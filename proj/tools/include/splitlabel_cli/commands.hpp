#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitlabel/dataset.hpp"
#include "splitlabel/engine.hpp"

namespace splitlabel::cli {

struct DataOptions {
    std::filesystem::path path;
    std::optional<std::string> label_column;
    std::optional<std::string> render_hint;
    std::optional<std::size_t> num_classes;
};

Dataset load_dataset(const DataOptions& options);

// Flags that override the config file (or defaults) when set.
struct ConfigOverrides {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::size_t> budget;
    std::optional<double> training_ratio;
    std::optional<double> quality;
    std::optional<std::string> splitter;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> min_split_size;
    bool early_stop = false;
};

RunConfig resolve_config(const ConfigOverrides& overrides);

struct RunOptions {
    DataOptions data;
    ConfigOverrides config;
    std::filesystem::path out;
    std::optional<std::filesystem::path> metrics;
    std::optional<std::filesystem::path> summary;
    std::optional<DataOptions> test_data;
};

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct BenchOptions {
    DataOptions data;
    std::optional<DataOptions> test_data;
    // Last rows of the data held out as the test set when no test data is given.
    std::size_t holdout = 0;
    ConfigOverrides config;
    std::vector<std::size_t> budgets;
    std::vector<std::string> splitters;
    std::vector<std::uint64_t> seeds;
    // Training ratio used for kmeans2 rows, which never train a splitter.
    double unsupervised_training_ratio = 0.0;
    std::optional<std::filesystem::path> out;
};

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

struct BoundcheckOptions {
    std::size_t trials = 2000;
    std::size_t cases = 1000;
    std::uint64_t seed = 0;
    double grid_step = 1e-5;
    double tolerance = 1e-6;
    double threshold = 0.05;
};

int cmd_boundcheck(const BoundcheckOptions& options, std::ostream& out, std::ostream& err);

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    // name=path or path (name defaults to the file stem).
    std::vector<std::string> data;
    std::optional<std::string> label_column;
    std::optional<std::string> render_hint;
    std::optional<std::filesystem::path> config_file;
    std::optional<std::filesystem::path> checkpoint_dir;
    std::optional<std::filesystem::path> static_dir;
};

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);

struct GenOptions {
    std::string kind = "blobs";
    std::size_t n = 1000;
    std::size_t dims = 2;
    std::size_t noise_dims = 50;
    std::size_t num_classes = 2;
    double spread = 1.0;
    std::uint64_t seed = 0;
    std::filesystem::path out;
};

int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err);

}  // namespace splitlabel::cli
