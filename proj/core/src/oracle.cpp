#include "splitlabel/oracle.hpp"

#include <string>

#include "splitlabel/dataset.hpp"
#include "splitlabel/error.hpp"

namespace splitlabel {

SimulatedOracle::SimulatedOracle(const Dataset& dataset) : truth_(nullptr) {
    if (!dataset.truth) {
        throw ContractViolation("simulated oracle needs a dataset with a truth column");
    }
    truth_ = &*dataset.truth;
}

ClassId SimulatedOracle::query(std::size_t example_id, std::span<const double>) {
    if (example_id >= truth_->size()) {
        throw OracleError("example " + std::to_string(example_id) + " outside the dataset");
    }
    ++calls_;
    return (*truth_)[example_id];
}

}  // namespace splitlabel
