#include "splitlabel/evaluation.hpp"

#include <set>

namespace splitlabel {

std::optional<double> train_eval(const FeatureMatrix& train_features,
                                 std::span<const ClassId> train_labels, const Dataset& test,
                                 const LogisticConfig& config) {
    const std::set<ClassId> distinct(train_labels.begin(), train_labels.end());
    if (distinct.size() < 2 || !test.truth || test.size() == 0) {
        return std::nullopt;
    }
    const std::size_t classes =
        std::max<std::size_t>(test.num_classes, static_cast<std::size_t>(*distinct.rbegin()) + 1);
    const Standardizer scaler = Standardizer::fit(train_features);
    const auto model =
        SoftmaxRegression::fit(scaler.apply(train_features), train_labels, classes, config);
    const auto predicted = model.predict(scaler.apply(test.features));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        correct += predicted[i] == (*test.truth)[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace splitlabel
