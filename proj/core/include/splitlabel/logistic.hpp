#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "splitlabel/dataset.hpp"

namespace splitlabel {

struct LogisticConfig {
    std::size_t epochs = 200;
    double step = 0.1;
    double l2 = 1e-3;
};

// Column-wise z-scoring with std floored at 1e-8.
struct Standardizer {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd inv_std;

    static Standardizer fit(const FeatureMatrix& features);
    FeatureMatrix apply(const FeatureMatrix& features) const;
};

// Multinomial logistic regression trained by full-batch gradient descent on
// mean cross-entropy plus (l2/2)||W||^2. Weights start at zero, so training is
// a pure function of its inputs.
class SoftmaxRegression {
public:
    static SoftmaxRegression fit(const FeatureMatrix& features, std::span<const ClassId> labels,
                                 std::size_t num_classes, const LogisticConfig& config);

    Eigen::MatrixXd logits(const FeatureMatrix& features) const;
    std::vector<ClassId> predict(const FeatureMatrix& features) const;
    double loss(const FeatureMatrix& features, std::span<const ClassId> labels) const;

    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    const Eigen::RowVectorXd& bias() const noexcept { return bias_; }

private:
    Eigen::MatrixXd weights_;  // d x C
    Eigen::RowVectorXd bias_;  // 1 x C
    double l2_ = 0.0;
};

}  // namespace splitlabel
