#include "splitlabel/assignment.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

constexpr std::string_view kHeader = "example_id,label,source,node_id,uniformity";

template <typename T>
T parse_number(std::string_view cell, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(line, "bad number '" + std::string(cell) + "'");
    }
    return value;
}

}  // namespace

std::string to_string(LabelSource source) {
    switch (source) {
        case LabelSource::oracle:
            return "oracle";
        case LabelSource::inferred:
            return "inferred";
        case LabelSource::none:
            break;
    }
    return "none";
}

LabelSource parse_label_source(const std::string& text) {
    if (text == "oracle") {
        return LabelSource::oracle;
    }
    if (text == "inferred") {
        return LabelSource::inferred;
    }
    if (text == "none") {
        return LabelSource::none;
    }
    throw std::invalid_argument("unknown label source '" + text + "'");
}

std::size_t LabelAssignment::count(LabelSource source) const {
    std::size_t total = 0;
    for (const auto& e : entries) {
        total += e.source == source ? 1 : 0;
    }
    return total;
}

std::optional<double> LabelAssignment::accuracy(const std::vector<ClassId>& truth) const {
    std::size_t labeled = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].label) {
            ++labeled;
            correct += *entries[i].label == truth.at(i) ? 1 : 0;
        }
    }
    if (labeled == 0) {
        return std::nullopt;
    }
    return static_cast<double>(correct) / static_cast<double>(labeled);
}

void write_label_export(const LabelAssignment& assignment, std::ostream& out) {
    out << kHeader << '\n';
    char buf[64];
    for (std::size_t i = 0; i < assignment.entries.size(); ++i) {
        const ExampleLabel& e = assignment.entries[i];
        out << i << ',';
        if (e.label) {
            out << *e.label;
        }
        const auto res = std::to_chars(buf, buf + sizeof(buf), e.uniformity);
        out << ',' << to_string(e.source) << ',' << e.node.value << ',';
        out.write(buf, res.ptr - buf);
        out << '\n';
    }
}

void export_labels(const LabelAssignment& assignment, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write label export " + path.string());
    }
    write_label_export(assignment, out);
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for label export " + path.string());
    }
}

std::string export_labels_string(const LabelAssignment& assignment) {
    std::ostringstream out;
    write_label_export(assignment, out);
    return out.str();
}

LabelAssignment parse_label_export(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw ParseError(1, "missing label export header");
    }
    LabelAssignment out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos;) {
            cells.push_back(rest.substr(0, comma));
            rest.remove_prefix(comma + 1);
        }
        cells.push_back(rest);
        if (cells.size() != 5) {
            throw ParseError(line_no, "expected 5 cells");
        }
        const auto id = parse_number<std::size_t>(cells[0], line_no);
        if (id != out.entries.size()) {
            throw ParseError(line_no, "example ids must be dense and ascending");
        }
        ExampleLabel e;
        if (!cells[1].empty()) {
            e.label = parse_number<ClassId>(cells[1], line_no);
        }
        e.source = parse_label_source(std::string(cells[2]));
        e.node = NodeId{parse_number<std::uint64_t>(cells[3], line_no)};
        e.uniformity = parse_number<double>(cells[4], line_no);
        out.entries.push_back(e);
    }
    return out;
}

}  // namespace splitlabel
