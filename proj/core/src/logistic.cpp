#include "splitlabel/logistic.hpp"

#include <cmath>

#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

// Row-wise softmax, in place.
void softmax_rows(Eigen::MatrixXd& z) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double top = z.row(i).maxCoeff();
        z.row(i) = (z.row(i).array() - top).exp();
        z.row(i) /= z.row(i).sum();
    }
}

}  // namespace

Standardizer Standardizer::fit(const FeatureMatrix& features) {
    Standardizer s;
    const auto rows = static_cast<double>(features.rows());
    s.mean = features.colwise().mean();
    const Eigen::RowVectorXd var =
        (features.rowwise() - s.mean).array().square().colwise().sum() / rows;
    s.inv_std = var.array().sqrt().max(1e-8).inverse();
    return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& features) const {
    return ((features.rowwise() - mean).array().rowwise() * inv_std.array()).matrix();
}

SoftmaxRegression SoftmaxRegression::fit(const FeatureMatrix& features,
                                         std::span<const ClassId> labels,
                                         std::size_t num_classes, const LogisticConfig& config) {
    if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.empty()) {
        throw ContractViolation("softmax regression needs one label per (nonempty) feature row");
    }
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    const auto classes = static_cast<Eigen::Index>(num_classes);

    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ClassId y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= classes) {
            throw ContractViolation("training label outside [0, C)");
        }
        onehot(i, y) = 1.0;
    }

    SoftmaxRegression model;
    model.weights_ = Eigen::MatrixXd::Zero(d, classes);
    model.bias_ = Eigen::RowVectorXd::Zero(classes);
    model.l2_ = config.l2;

    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Eigen::MatrixXd residual = (features * model.weights_).rowwise() + model.bias_;
        softmax_rows(residual);
        residual -= onehot;
        const Eigen::MatrixXd grad_w =
            inv_n * (features.transpose() * residual) + config.l2 * model.weights_;
        const Eigen::RowVectorXd grad_b = inv_n * residual.colwise().sum();
        model.weights_ -= config.step * grad_w;
        model.bias_ -= config.step * grad_b;
    }
    return model;
}

Eigen::MatrixXd SoftmaxRegression::logits(const FeatureMatrix& features) const {
    return (features * weights_).rowwise() + bias_;
}

std::vector<ClassId> SoftmaxRegression::predict(const FeatureMatrix& features) const {
    const Eigen::MatrixXd z = logits(features);
    std::vector<ClassId> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        Eigen::Index best = 0;
        z.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
    }
    return out;
}

double SoftmaxRegression::loss(const FeatureMatrix& features,
                               std::span<const ClassId> labels) const {
    Eigen::MatrixXd p = logits(features);
    softmax_rows(p);
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        total -= std::log(p(i, labels[static_cast<std::size_t>(i)]));
    }
    return total / static_cast<double>(p.rows()) + 0.5 * l2_ * weights_.squaredNorm();
}

}  // namespace splitlabel
