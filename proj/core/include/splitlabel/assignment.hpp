#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitlabel/tree.hpp"

namespace splitlabel {

enum class LabelSource { none, oracle, inferred };

std::string to_string(LabelSource source);
LabelSource parse_label_source(const std::string& text);

struct ExampleLabel {
    std::optional<ClassId> label;
    LabelSource source = LabelSource::none;
    NodeId node;
    double uniformity = 0.0;

    friend bool operator==(const ExampleLabel&, const ExampleLabel&) = default;
};

// Final output, one entry per dataset example (index = example id).
struct LabelAssignment {
    std::vector<ExampleLabel> entries;

    std::size_t count(LabelSource source) const;
    // Oracle plus inferred entries.
    std::size_t size_of_y() const { return entries.size() - count(LabelSource::none); }
    // Fraction of labeled entries matching truth; nullopt when nothing is labeled.
    std::optional<double> accuracy(const std::vector<ClassId>& truth) const;

    friend bool operator==(const LabelAssignment&, const LabelAssignment&) = default;
};

// CSV: example_id,label,source,node_id,uniformity. Uniformity is printed in
// shortest round-trip form so parse_label_export reproduces it exactly.
void write_label_export(const LabelAssignment& assignment, std::ostream& out);
void export_labels(const LabelAssignment& assignment, const std::filesystem::path& path);
std::string export_labels_string(const LabelAssignment& assignment);
LabelAssignment parse_label_export(std::istream& in);

}  // namespace splitlabel
