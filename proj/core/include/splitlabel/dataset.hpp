#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splitlabel/tree.hpp"

namespace splitlabel {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct RenderHint {
    std::size_t height = 0;
    std::size_t width = 0;

    friend bool operator==(const RenderHint&, const RenderHint&) = default;
};

struct Dataset {
    FeatureMatrix features;
    std::optional<std::vector<ClassId>> truth;
    std::size_t num_classes = 2;
    std::optional<RenderHint> render_hint;

    std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * dims(), dims()};
    }

    // Throws ContractViolation when C < 2 or a truth value is out of range.
    void validate() const;
};

// Copies the given rows (in order) into a dense matrix.
FeatureMatrix gather_rows(const FeatureMatrix& features, std::span<const std::size_t> rows);

// Parses "HxW" (e.g. "28x28").
RenderHint parse_render_hint(const std::string& text);

struct CsvOptions {
    std::optional<std::string> label_column;
    std::optional<RenderHint> render_hint;
    std::optional<std::size_t> num_classes;
};

// Header row plus numeric rows. Errors carry the 1-based line number.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Columns f0..f{d-1}[,label]; features printed with 9 significant digits.
void write_csv(const Dataset& dataset, const std::filesystem::path& path,
               const std::string& label_column = "label");

// C isotropic Gaussian clusters with means spaced 10 apart on a simplex-like layout.
Dataset gen_blobs(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t num_classes,
                  double spread);

// Class signal in the first d_relevant dimensions, uniform noise in the rest.
Dataset gen_noise_dims(std::uint64_t seed, std::size_t n, std::size_t d_relevant,
                       std::size_t d_noise, std::size_t num_classes);

}  // namespace splitlabel
