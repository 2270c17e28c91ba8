#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "epiwarn/errors.hpp"
#include "epiwarn/learners.hpp"

namespace epiwarn {

namespace {

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

}  // namespace

// Ridge-penalized logistic regression by iteratively reweighted least squares.
// The intercept is not penalized.
TrainedModel train_lrm(const FeatureMatrix& train, const TrainConfig& config) {
    TrainedModel model;
    model.kind = ModelKind::LRM;
    model.feature_set = train.set_id;
    model.feature_names = train.names;
    model.config = config;
    model.standardization = fit_standardizer(train.rows, true);
    const Rows x = apply_standardizer(model.standardization, train.rows);

    const std::size_t n = x.size();
    const std::size_t d = model.standardization.kept.size();
    const auto n_pos = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), Label::T));

    LrmParams params;
    params.weights.assign(d, 0.0);
    if (n_pos == 0 || n_pos == n) {
        params.constant_probability = static_cast<double>(n_pos) / static_cast<double>(n);
        model.warnings.push_back("single-class training data: intercept-only model");
        model.params = params;
        return model;
    }

    Eigen::MatrixXd design(n, d + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < d; ++j) design(i, j + 1) = x[i][j];
        y(i) = train.labels[i] == Label::T ? 1.0 : 0.0;
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, config.lrm.ridge);
    penalty(0) = 0.0;

    int it = 0;
    for (; it < config.lrm.max_iterations; ++it) {
        const Eigen::VectorXd eta = design * beta;
        Eigen::VectorXd p(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            p(i) = sigmoid(eta(i));
            w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
        }
        Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
        hessian.diagonal() += penalty;
        const Eigen::VectorXd grad = design.transpose() * (y - p) - penalty.cwiseProduct(beta);
        const Eigen::VectorXd step = hessian.ldlt().solve(grad);
        if (!step.allFinite()) {
            model.warnings.push_back("IRLS step not finite; stopped early");
            break;
        }
        beta += step;
        if (step.cwiseAbs().maxCoeff() < config.lrm.tolerance) {
            ++it;
            break;
        }
    }
    params.iterations = it;
    params.intercept = beta(0);
    for (std::size_t j = 0; j < d; ++j) params.weights[j] = beta(j + 1);
    model.params = params;
    return model;
}

}  // namespace epiwarn
