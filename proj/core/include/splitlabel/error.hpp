#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitlabel {

// Caller broke a documented precondition (invalid counts, non-leaf node, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class EmptyDatasetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Example already placed in the node's bound or isolated set.
class DoubleConsumptionError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

class MembershipError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

// Partition with fewer than two nonempty children.
class DegenerateSplitError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

class CoverageError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

// Label action proposed on a node with nothing left to sample.
class NoConsumableExampleError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// The oracle could not produce a label (timeout, disconnect, ...).
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace splitlabel
