#include <iostream>

#include <CLI11.hpp>

#include "splitlabel_cli/commands.hpp"

namespace {

using namespace splitlabel::cli;

void add_data_flags(CLI::App& app, DataOptions& data, const std::string& prefix = "") {
    app.add_option("--" + prefix + "data", data.path, "CSV with a header row")->required();
    data.label_column = "label";
    app.add_option("--" + prefix + "label-column", data.label_column,
                   "Ground-truth column (empty for none)");
    app.add_option("--" + prefix + "render-hint", data.render_hint, "Image shape, e.g. 28x28");
    app.add_option("--" + prefix + "num-classes", data.num_classes,
                   "Class count (default: max label + 1)");
}

void add_config_flags(CLI::App& app, ConfigOverrides& config) {
    app.add_option("--config", config.config_file, "Run config JSON; flags override it");
    app.add_option("--budget", config.budget, "Oracle queries allowed");
    app.add_option("--training-ratio", config.training_ratio,
                   "Chance a fresh label goes to the isolated training set");
    app.add_option("--quality", config.quality, "Leaf uniformity needed to infer labels (0.85)");
    app.add_option("--splitter", config.splitter, "logistic or kmeans2")
        ->check(CLI::IsMember({"logistic", "kmeans2"}));
    app.add_option("--seed", config.seed, "RNG seed");
    app.add_option("--min-split-size", config.min_split_size, "Smallest leaf considered for splits");
    app.add_flag("--early-stop", config.early_stop, "Stop when no action improves the bound");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budgeted active labeling by bound-guided splitting"};
    app.require_subcommand(1);

    RunOptions run;
    std::string test_data;
    auto* run_cmd = app.add_subcommand("run", "Label a dataset with the simulated oracle");
    add_data_flags(*run_cmd, run.data);
    add_config_flags(*run_cmd, run.config);
    run_cmd->add_option("--out", run.out, "Labels CSV")->required();
    run_cmd->add_option("--metrics", run.metrics, "Per-step JSON lines");
    run_cmd->add_option("--summary", run.summary, "Summary JSON");
    run_cmd->add_option("--test-data", test_data, "Labeled CSV for downstream model accuracy");

    BenchOptions bench;
    std::string bench_test_data;
    auto* bench_cmd = app.add_subcommand("bench", "Sweep budgets x splitters x seeds");
    add_data_flags(*bench_cmd, bench.data);
    add_config_flags(*bench_cmd, bench.config);
    bench_cmd->add_option("--budgets", bench.budgets, "Budgets to sweep")->delimiter(',');
    bench_cmd->add_option("--splitters", bench.splitters, "Splitters to sweep")->delimiter(',');
    bench_cmd->add_option("--seeds", bench.seeds, "Seeds to sweep")->delimiter(',');
    bench_cmd->add_option("--test-data", bench_test_data, "Labeled CSV for model accuracy");
    bench_cmd->add_option("--holdout", bench.holdout,
                          "Hold out the last rows as the test set");
    bench_cmd->add_option("--unsupervised-training-ratio", bench.unsupervised_training_ratio,
                          "Training ratio for kmeans2 rows");
    bench_cmd->add_option("--out", bench.out, "Table CSV (default stdout)");

    BoundcheckOptions check;
    auto* check_cmd = app.add_subcommand("boundcheck", "Validate the bound and its maximizer");
    check_cmd->add_option("--trials", check.trials, "Monte-Carlo trials per cell");
    check_cmd->add_option("--cases", check.cases, "Random stats for the grid comparison");
    check_cmd->add_option("--seed", check.seed, "RNG seed");
    check_cmd->add_option("--grid-step", check.grid_step, "Grid spacing over t");
    check_cmd->add_option("--tolerance", check.tolerance, "Allowed |ternary - grid|");
    check_cmd->add_option("--threshold", check.threshold, "Allowed violation rate per cell");

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Host labeling sessions over HTTP");
    serve_cmd->add_option("--host", serve.host, "Interface to bind");
    serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)");
    serve_cmd->add_option("--data", serve.data, "Dataset as name=path or path")->required();
    serve.label_column = "label";
    serve_cmd->add_option("--label-column", serve.label_column, "Ground-truth column");
    serve_cmd->add_option("--render-hint", serve.render_hint, "Image shape, e.g. 28x28");
    serve_cmd->add_option("--config", serve.config_file, "Default run config JSON");
    serve_cmd->add_option("--checkpoint-dir", serve.checkpoint_dir, "Session checkpoints");
    serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic dataset");
    gen_cmd->add_option("--kind", gen.kind, "blobs or noise")
        ->check(CLI::IsMember({"blobs", "noise"}));
    gen_cmd->add_option("--n", gen.n, "Examples");
    gen_cmd->add_option("--dims", gen.dims, "Dimensions (relevant ones for noise)");
    gen_cmd->add_option("--noise-dims", gen.noise_dims, "Noise dimensions");
    gen_cmd->add_option("--classes", gen.num_classes, "Classes");
    gen_cmd->add_option("--spread", gen.spread, "Cluster standard deviation (blobs)");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        if (!test_data.empty()) {
            run.test_data = DataOptions{test_data, run.data.label_column, run.data.render_hint,
                                        run.data.num_classes};
        }
        return cmd_run(run, std::cout, std::cerr);
    }
    if (*bench_cmd) {
        if (!bench_test_data.empty()) {
            bench.test_data = DataOptions{bench_test_data, bench.data.label_column,
                                          bench.data.render_hint, bench.data.num_classes};
        }
        return cmd_bench(bench, std::cout, std::cerr);
    }
    if (*check_cmd) {
        return cmd_boundcheck(check, std::cout, std::cerr);
    }
    if (*serve_cmd) {
        return cmd_serve(serve, std::cout, std::cerr);
    }
    return cmd_gen(gen, std::cout, std::cerr);
}
