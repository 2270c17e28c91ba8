#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epiwarn/features.hpp"
#include "epiwarn/metrics.hpp"

namespace epiwarn {

enum class ModelKind { GBM, LRM, KNN, SVM };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
/// Single-letter code used in classifier names (G, L, K, S).
char model_code(ModelKind kind);

using Rows = std::vector<std::vector<double>>;

/// Column means and sample sds from the training matrix. Constant columns are
/// dropped; `kept` lists the surviving input column indices.
struct StandardizationStats {
    std::size_t input_dim = 0;
    std::vector<std::size_t> kept;
    std::vector<double> mean;  // per kept column
    std::vector<double> sd;    // per kept column
    std::vector<std::size_t> dropped;
    bool scale = true;  // false: select columns only (GBM)
};

StandardizationStats fit_standardizer(const Rows& train, bool scale = true);
Rows apply_standardizer(const StandardizationStats& stats, const Rows& rows);

struct LrmConfig {
    double ridge = 1e-6;
    double tolerance = 1e-8;
    int max_iterations = 100;
};

struct KnnConfig {
    int k = 0;  // 0: choose by cross-validation over `grid`
    std::vector<int> grid = {3, 5, 7, 9, 11, 13};
    int folds = 5;
};

struct SvmConfig {
    double c = 1.0;
    double gamma = 0.0;  // 0: 1 / feature count
    double tolerance = 1e-3;
    long max_iterations = 10'000'000;
    std::size_t cache_mb = 256;
    bool record_objective = false;
};

struct GbmConfig {
    int rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_samples_leaf = 10;
};

struct TrainConfig {
    LrmConfig lrm;
    KnnConfig knn;
    SvmConfig svm;
    GbmConfig gbm;
    std::uint64_t seed = 0;
};

struct LrmParams {
    std::vector<double> weights;
    double intercept = 0.0;
    std::optional<double> constant_probability;  // single-class fit
    int iterations = 0;
};

struct KnnParams {
    Rows x;
    std::vector<Label> y;
    int k = 1;
    std::vector<double> cv_accuracy;  // aligned with the k grid when tuned
};

struct SvmParams {
    Rows support_vectors;
    std::vector<double> coef;  // alpha_i y_i
    double rho = 0.0;
    double gamma = 1.0;
    double c = 1.0;
    long iterations = 0;
    double kkt_gap = 0.0;                   // final m(alpha) - M(alpha)
    std::vector<double> alpha;              // full dual vector (training order)
    std::vector<double> objective_history;  // dual objective per iteration, when recorded
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(const std::vector<double>& x) const;
};

struct GbmParams {
    double init = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
    std::vector<double> loss_history;  // mean log-loss after each round (index 0: initial)
};

struct TrainedModel {
    ModelKind kind = ModelKind::LRM;
    FeatureSet feature_set = FeatureSet::EWSI5;
    std::vector<std::string> feature_names;
    StandardizationStats standardization;
    TrainConfig config;
    std::variant<LrmParams, KnnParams, SvmParams, GbmParams> params;
    std::vector<std::string> warnings;
};

TrainedModel train_lrm(const FeatureMatrix& train, const TrainConfig& config);
TrainedModel train_knn(const FeatureMatrix& train, const TrainConfig& config);
TrainedModel train_svm(const FeatureMatrix& train, const TrainConfig& config);
TrainedModel train_gbm(const FeatureMatrix& train, const TrainConfig& config);
TrainedModel train_model(ModelKind kind, const FeatureMatrix& train, const TrainConfig& config);

/// Ranking scores, larger = more T-like: log-odds for LRM/GBM (no ties from
/// saturated probabilities), neighbour vote share for KNN, decision value for SVM.
std::vector<double> predict_score(const TrainedModel& model, const Rows& rows);
std::vector<double> predict_score(const TrainedModel& model, const FeatureMatrix& matrix);
std::vector<Label> predict_label(const TrainedModel& model, const Rows& rows);
std::vector<Label> predict_label(const TrainedModel& model, const FeatureMatrix& matrix);
/// Score at or above which a row is labelled T (0.5 for KNN, else 0).
double decision_threshold(ModelKind kind);

EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& test);

/// Largest KKT violation m(alpha) - M(alpha) of an SVM dual solution on its
/// training data, recomputed from scratch.
double svm_kkt_violation(const SvmParams& params, const Rows& standardized_train, const std::vector<Label>& labels);

/// Dual objective sum(alpha) - 1/2 alpha' Q alpha.
double svm_dual_objective(const SvmParams& params, const Rows& standardized_train, const std::vector<Label>& labels);

}  // namespace epiwarn
