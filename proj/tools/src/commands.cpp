#include "splitlabel_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include <pthread.h>

#include <nlohmann/json.hpp>

#include "splitlabel/assignment.hpp"
#include "splitlabel/bound_check.hpp"
#include "splitlabel/error.hpp"
#include "splitlabel/evaluation.hpp"
#include "splitlabel/http_server.hpp"
#include "splitlabel/oracle.hpp"
#include "splitlabel/service.hpp"

namespace splitlabel::cli {
namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return nlohmann::json::parse(in);
}

void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(2) << '\n';
}

std::string format_fixed(std::optional<double> value, int digits = 4) {
    if (!value) {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, *value);
    return buf;
}

// Rows [begin, end) of a dataset as a new dataset.
Dataset slice(const Dataset& data, std::size_t begin, std::size_t end) {
    Dataset out;
    out.features = data.features.middleRows(static_cast<Eigen::Index>(begin),
                                            static_cast<Eigen::Index>(end - begin));
    if (data.truth) {
        out.truth.emplace(data.truth->begin() + static_cast<std::ptrdiff_t>(begin),
                          data.truth->begin() + static_cast<std::ptrdiff_t>(end));
    }
    out.num_classes = data.num_classes;
    out.render_hint = data.render_hint;
    return out;
}

// Downstream accuracy of a model trained on the returned labels.
std::optional<double> model_accuracy(const Dataset& data, const LabelAssignment& assignment,
                                     const Dataset& test) {
    std::vector<std::size_t> rows;
    std::vector<ClassId> labels;
    for (std::size_t i = 0; i < assignment.entries.size(); ++i) {
        if (assignment.entries[i].label) {
            rows.push_back(i);
            labels.push_back(*assignment.entries[i].label);
        }
    }
    return train_eval(gather_rows(data.features, rows), labels, test);
}

struct Outcome {
    std::size_t size_of_y = 0;
    std::size_t oracle_labels = 0;
    std::size_t inferred_labels = 0;
    std::optional<double> label_accuracy;
    std::optional<double> model_accuracy;
    std::size_t num_leaves = 1;
    std::size_t budget_used = 0;
};

Outcome summarize(const RunConfig& config, const Dataset& data, const RunResult& result,
                  const Dataset* test) {
    Outcome o;
    o.size_of_y = result.assignment.size_of_y();
    o.oracle_labels = result.assignment.count(LabelSource::oracle);
    o.inferred_labels = result.assignment.count(LabelSource::inferred);
    if (data.truth) {
        o.label_accuracy = result.assignment.accuracy(*data.truth);
    }
    if (test) {
        o.model_accuracy = model_accuracy(data, result.assignment, *test);
    }
    if (!result.trace.empty()) {
        o.num_leaves = result.trace.back().num_leaves_after;
        o.budget_used = config.budget - result.trace.back().budget_after;
    }
    return o;
}

void checked_distinct(const std::vector<std::filesystem::path>& paths) {
    std::set<std::filesystem::path> seen;
    for (const auto& p : paths) {
        if (!seen.insert(std::filesystem::weakly_canonical(p)).second) {
            throw std::invalid_argument("output path " + p.string() +
                                        " is used twice; data, labels, metrics and summary paths "
                                        "must be distinct");
        }
    }
}

}  // namespace

Dataset load_dataset(const DataOptions& options) {
    CsvOptions csv;
    if (options.label_column && !options.label_column->empty()) {
        csv.label_column = options.label_column;
    }
    if (options.render_hint) {
        csv.render_hint = parse_render_hint(*options.render_hint);
    }
    csv.num_classes = options.num_classes;
    return load_csv(options.path, csv);
}

RunConfig resolve_config(const ConfigOverrides& overrides) {
    nlohmann::json doc = nlohmann::json::object();
    if (overrides.config_file) {
        doc = read_json_file(*overrides.config_file);
    }
    if (overrides.budget) {
        doc["budget"] = *overrides.budget;
    }
    if (overrides.training_ratio) {
        doc["training_ratio"] = *overrides.training_ratio;
    }
    if (overrides.quality) {
        doc["quality"] = *overrides.quality;
    }
    if (overrides.seed) {
        doc["seed"] = *overrides.seed;
    }
    if (overrides.min_split_size) {
        doc["min_split_size"] = *overrides.min_split_size;
    }
    if (overrides.early_stop) {
        doc["early_stop"] = true;
    }
    if (overrides.splitter) {
        doc["splitter"]["kind"] = *overrides.splitter;
    }
    RunConfig config = run_config_from_json(doc);
    config.validate();
    return config;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::filesystem::path> paths{options.data.path, options.out};
        if (options.metrics) {
            paths.push_back(*options.metrics);
        }
        if (options.summary) {
            paths.push_back(*options.summary);
        }
        checked_distinct(paths);

        const RunConfig config = resolve_config(options.config);
        const Dataset data = load_dataset(options.data);
        if (!data.truth) {
            err << "error: " << options.data.path.string()
                << " has no label column; simulated runs need ground truth\n";
            return 2;
        }
        std::optional<Dataset> test;
        if (options.test_data) {
            test = load_dataset(*options.test_data);
        }

        std::ofstream metrics;
        if (options.metrics) {
            metrics.open(*options.metrics, std::ios::binary);
            if (!metrics) {
                throw std::runtime_error("cannot write " + options.metrics->string());
            }
        }
        SimulatedOracle oracle(data);
        const auto start = std::chrono::steady_clock::now();
        const RunResult result = run(config, data, oracle, [&](const ActionRecord& record) {
            if (metrics.is_open()) {
                metrics << to_json(record).dump() << '\n';
                metrics.flush();
            }
        });
        const double wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        export_labels(result.assignment, options.out);

        const Outcome o = summarize(config, data, result, test ? &*test : nullptr);
        nlohmann::json summary{{"size_of_Y", o.size_of_y},
                               {"oracle_labels", o.oracle_labels},
                               {"inferred_labels", o.inferred_labels},
                               {"num_leaves", o.num_leaves},
                               {"budget_used", o.budget_used},
                               {"seed", config.seed},
                               {"wall_time", wall_time}};
        summary["label_accuracy"] = o.label_accuracy ? nlohmann::json(*o.label_accuracy) : nlohmann::json(nullptr);
        if (test) {
            summary["model_accuracy"] =
                o.model_accuracy ? nlohmann::json(*o.model_accuracy) : nlohmann::json(nullptr);
        }
        if (!result.trace.empty() && result.trace.back().true_correct_after) {
            summary["true_correct"] = *result.trace.back().true_correct_after;
        }
        if (options.summary) {
            write_json_file(summary, *options.summary);
        }
        out << summary.dump() << '\n';

        if (result.oracle_error) {
            err << "error: oracle failed: " << *result.oracle_error << '\n';
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
    try {
        std::ofstream file;
        if (options.out) {
            file.open(*options.out, std::ios::binary);
            if (!file) {
                throw std::runtime_error("cannot write " + options.out->string());
            }
        }
        std::ostream& table = options.out ? static_cast<std::ostream&>(file) : out;
        table << "budget,splitter,seed,size_of_Y,oracle_labels,inferred_labels,label_accuracy,"
                 "model_accuracy,num_leaves,budget_used\n";
        if (options.budgets.empty() || options.splitters.empty() || options.seeds.empty()) {
            return 0;
        }
        for (const auto& s : options.splitters) {
            parse_splitter_kind(s);
        }

        Dataset data = load_dataset(options.data);
        if (!data.truth) {
            err << "error: " << options.data.path.string()
                << " has no label column; simulated runs need ground truth\n";
            return 2;
        }
        std::optional<Dataset> test;
        if (options.test_data) {
            test = load_dataset(*options.test_data);
        } else if (options.holdout > 0) {
            if (options.holdout >= data.size()) {
                throw std::invalid_argument("holdout must leave examples to label");
            }
            const std::size_t cut = data.size() - options.holdout;
            test = slice(data, cut, data.size());
            data = slice(data, 0, cut);
        }

        const RunConfig base = resolve_config(options.config);
        for (std::size_t budget : options.budgets) {
            for (const auto& splitter : options.splitters) {
                for (std::uint64_t seed : options.seeds) {
                    RunConfig config = base;
                    config.budget = budget;
                    config.seed = seed;
                    config.splitter.seed = seed;
                    config.splitter.kind = parse_splitter_kind(splitter);
                    if (config.splitter.kind == SplitterKind::kmeans2) {
                        config.training_ratio = options.unsupervised_training_ratio;
                    }
                    config.validate();
                    SimulatedOracle oracle(data);
                    const RunResult result = run(config, data, oracle);
                    const Outcome o = summarize(config, data, result, test ? &*test : nullptr);
                    table << budget << ',' << splitter << ',' << seed << ',' << o.size_of_y
                          << ',' << o.oracle_labels << ',' << o.inferred_labels << ','
                          << format_fixed(o.label_accuracy) << ','
                          << format_fixed(o.model_accuracy) << ',' << o.num_leaves << ','
                          << o.budget_used << '\n';
                    table.flush();
                }
            }
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_boundcheck(const BoundcheckOptions& options, std::ostream& out, std::ostream& err) {
    try {
        bool ok = true;
        const auto eq = check_ternary_against_grid(options.cases, options.seed, options.grid_step,
                                                   options.tolerance);
        char line[256];
        std::snprintf(line, sizeof line,
                      "grid equivalence: cases=%zu failures=%zu max_abs_diff=%.3e tol=%.1e %s\n",
                      eq.cases, eq.failures, eq.max_abs_diff, options.tolerance,
                      eq.failures == 0 ? "PASS" : "FAIL");
        out << line;
        std::snprintf(line, sizeof line,
                      "refined grid: failures=%zu max_abs_diff=%.3e below_coarse_grid=%zu\n",
                      eq.refined_failures, eq.refined_max_abs_diff, eq.below_grid);
        out << line;
        ok = ok && eq.failures == 0;

        out << "p,n,N,trials,violations,rate,realized_rate,status\n";
        for (const auto& cell : monte_carlo_suite(options.trials, options.seed)) {
            const bool pass = cell.rate() <= options.threshold;
            ok = ok && pass;
            std::snprintf(line, sizeof line, "%.2f,%zu,%zu,%zu,%zu,%.4f,%.4f,%s\n", cell.p,
                          cell.n, cell.N, cell.trials, cell.violations, cell.rate(),
                          cell.realized_rate(), pass ? "PASS" : "FAIL");
            out << line;
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err) {
    try {
        SessionManager::DatasetMap datasets;
        for (const auto& entry : options.data) {
            const auto eq = entry.find('=');
            DataOptions d;
            d.path = eq == std::string::npos ? entry : entry.substr(eq + 1);
            d.label_column = options.label_column;
            d.render_hint = options.render_hint;
            const std::string name =
                eq == std::string::npos ? d.path.stem().string() : entry.substr(0, eq);
            if (datasets.count(name)) {
                throw std::invalid_argument("dataset name '" + name + "' given twice");
            }
            datasets.emplace(name, std::make_shared<const Dataset>(load_dataset(d)));
        }

        SessionManager sessions(std::move(datasets), options.checkpoint_dir);
        if (options.config_file) {
            auto config = read_json_file(*options.config_file);
            run_config_from_json(config).validate();
            sessions.set_default_config(std::move(config));
        }
        if (options.checkpoint_dir) {
            const std::size_t restored = sessions.load_checkpoints();
            if (restored) {
                out << "restored " << restored << " session(s)\n";
            }
        }

        HttpServer server(sessions, options.static_dir);
        const int port = server.bind(options.host, options.port);
        out << "listening on http://" << options.host << ':' << port << std::endl;

        // Block termination signals so server threads inherit the mask and
        // this thread can wait for them.
        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);

        std::thread worker([&] { server.serve(); });
        int received = 0;
        sigwait(&signals, &received);
        server.stop();
        worker.join();
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_gen(const GenOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Dataset data;
        if (options.kind == "blobs") {
            data = gen_blobs(options.seed, options.n, options.dims, options.num_classes,
                             options.spread);
        } else if (options.kind == "noise") {
            data = gen_noise_dims(options.seed, options.n, options.dims, options.noise_dims,
                                  options.num_classes);
        } else {
            throw std::invalid_argument("unknown dataset kind '" + options.kind + "'");
        }
        write_csv(data, options.out);
        out << "wrote " << data.size() << " rows to " << options.out.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace splitlabel::cli
