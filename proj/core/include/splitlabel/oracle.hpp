#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "splitlabel/tree.hpp"

namespace splitlabel {

struct Dataset;

// Label source. query() blocks until a label is available and must answer
// the same class for repeated queries of one example. Failures throw OracleError.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual ClassId query(std::size_t example_id, std::span<const double> features) = 0;
};

// Reveals the stored ground truth.
class SimulatedOracle final : public Oracle {
public:
    // Throws ContractViolation when the dataset has no truth column.
    explicit SimulatedOracle(const Dataset& dataset);

    ClassId query(std::size_t example_id, std::span<const double> features) override;

    std::size_t calls() const noexcept { return calls_; }

private:
    const std::vector<ClassId>* truth_;
    std::size_t calls_ = 0;
};

}  // namespace splitlabel
