#include "splitlabel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <system_error>

#include "splitlabel/error.hpp"
#include "splitlabel/random.hpp"

namespace splitlabel {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

double parse_real(std::string_view cell, std::size_t line, std::size_t column) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(line, "non-numeric cell '" + std::string(cell) + "' in column " +
                                   std::to_string(column));
    }
    return value;
}

// Centers spaced 10 apart: class c sits on axis c % d at distance 10 * (1 + c / d).
Eigen::RowVectorXd blob_center(std::size_t cls, std::size_t d) {
    Eigen::RowVectorXd center = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(d));
    center(static_cast<Eigen::Index>(cls % d)) = 10.0 * static_cast<double>(1 + cls / d);
    return center;
}

}  // namespace

void Dataset::validate() const {
    if (num_classes < 2) {
        throw ContractViolation("a dataset needs at least two classes");
    }
    if (truth) {
        if (truth->size() != size()) {
            throw ContractViolation("truth column length differs from the feature rows");
        }
        for (ClassId c : *truth) {
            if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
                throw ContractViolation("truth value " + std::to_string(c) + " outside [0, " +
                                        std::to_string(num_classes) + ")");
            }
        }
    }
}

FeatureMatrix gather_rows(const FeatureMatrix& features, std::span<const std::size_t> rows) {
    FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

RenderHint parse_render_hint(const std::string& text) {
    const auto x = text.find_first_of("xX");
    RenderHint hint;
    if (x != std::string::npos) {
        const std::string_view s(text);
        const auto h = std::from_chars(s.data(), s.data() + x, hint.height);
        const auto w = std::from_chars(s.data() + x + 1, s.data() + s.size(), hint.width);
        if (h.ec == std::errc() && w.ec == std::errc() && h.ptr == s.data() + x &&
            w.ptr == s.data() + s.size() && hint.height > 0 && hint.width > 0) {
            return hint;
        }
    }
    throw std::invalid_argument("render hint must look like HxW, got '" + text + "'");
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header row in " + path.string());
    }
    const auto header = split_cells(line);
    std::optional<std::size_t> label_index;
    if (options.label_column) {
        const auto it = std::find(header.begin(), header.end(), *options.label_column);
        if (it == header.end()) {
            throw ParseError(1, "label column '" + *options.label_column + "' not in header");
        }
        label_index = static_cast<std::size_t>(it - header.begin());
    }
    const std::size_t width = header.size();
    const std::size_t dims = width - (label_index ? 1 : 0);

    std::vector<double> values;
    std::vector<ClassId> labels;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_cells(line);
        if (cells.size() != width) {
            throw ParseError(line_no, "expected " + std::to_string(width) + " cells, found " +
                                          std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < width; ++c) {
            const double v = parse_real(cells[c], line_no, c);
            if (label_index && c == *label_index) {
                if (!(v >= 0.0) || v > static_cast<double>(std::numeric_limits<ClassId>::max()) ||
                    v != std::floor(v)) {
                    throw ParseError(line_no, "label '" + std::string(cells[c]) +
                                                  "' is not a non-negative integer");
                }
                const auto label = static_cast<ClassId>(v);
                if (options.num_classes &&
                    static_cast<std::size_t>(label) >= *options.num_classes) {
                    throw ParseError(line_no, "label " + std::to_string(label) +
                                                  " outside the configured class count");
                }
                labels.push_back(label);
            } else {
                values.push_back(v);
            }
        }
        ++rows;
    }

    Dataset data;
    data.features = FeatureMatrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims));
    std::copy(values.begin(), values.end(), data.features.data());
    data.render_hint = options.render_hint;
    if (label_index) {
        ClassId top = 0;
        for (ClassId l : labels) {
            top = std::max(top, l);
        }
        data.num_classes = options.num_classes.value_or(
            std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1));
        data.truth = std::move(labels);
    } else {
        data.num_classes = options.num_classes.value_or(2);
    }
    data.validate();
    return data;
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path,
               const std::string& label_column) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    for (std::size_t j = 0; j < dataset.dims(); ++j) {
        out << (j ? "," : "") << 'f' << j;
    }
    if (dataset.truth) {
        out << ',' << label_column;
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto row = dataset.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), row[j],
                                           std::chars_format::general, 9);
            if (j) {
                out << ',';
            }
            out.write(buf, res.ptr - buf);
        }
        if (dataset.truth) {
            out << ',' << (*dataset.truth)[i];
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

Dataset gen_blobs(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t num_classes,
                  double spread) {
    if (num_classes < 2 || n < num_classes || d == 0) {
        throw ContractViolation("gen_blobs needs N >= C >= 2 and d >= 1");
    }
    Rng rng(seed);
    Dataset data;
    data.num_classes = num_classes;
    data.features = FeatureMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<ClassId> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cls = i % num_classes;
        truth[i] = static_cast<ClassId>(cls);
        const Eigen::RowVectorXd center = blob_center(cls, d);
        for (std::size_t j = 0; j < d; ++j) {
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                center(static_cast<Eigen::Index>(j)) + spread * rng.normal();
        }
    }
    data.truth = std::move(truth);
    return data;
}

Dataset gen_noise_dims(std::uint64_t seed, std::size_t n, std::size_t d_relevant,
                       std::size_t d_noise, std::size_t num_classes) {
    if (d_relevant == 0) {
        throw ContractViolation("gen_noise_dims needs at least one relevant dimension");
    }
    constexpr double kNoiseHalfWidth = 25.0;
    Dataset relevant = gen_blobs(seed, n, d_relevant, num_classes, 1.0);
    if (d_noise == 0) {
        return relevant;
    }
    Rng rng(derive_seed(seed, 1));
    Dataset data;
    data.num_classes = num_classes;
    data.truth = std::move(relevant.truth);
    data.features = FeatureMatrix(static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(d_relevant + d_noise));
    data.features.leftCols(static_cast<Eigen::Index>(d_relevant)) = relevant.features;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d_noise; ++j) {
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d_relevant + j)) =
                kNoiseHalfWidth * (2.0 * rng.unit_real() - 1.0);
        }
    }
    return data;
}

}  // namespace splitlabel
