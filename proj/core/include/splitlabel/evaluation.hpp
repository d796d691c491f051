#pragma once

#include <optional>
#include <span>

#include "splitlabel/dataset.hpp"
#include "splitlabel/logistic.hpp"

namespace splitlabel {

// Trains the shared softmax regression on (features, labels), standardized
// with training statistics, and returns accuracy on the test dataset's truth.
// nullopt when the training labels hold fewer than two classes or the test
// set carries no truth.
std::optional<double> train_eval(const FeatureMatrix& train_features,
                                 std::span<const ClassId> train_labels, const Dataset& test,
                                 const LogisticConfig& config = {});

}  // namespace splitlabel
