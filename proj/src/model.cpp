#include <algorithm>
#include <cmath>

#include "epiwarn/errors.hpp"
#include "learner_internal.hpp"

namespace epiwarn {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::GBM: return "GBM";
        case ModelKind::LRM: return "LRM";
        case ModelKind::KNN: return "KNN";
        case ModelKind::SVM: return "SVM";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "GBM" || text == "gbm" || text == "G") return ModelKind::GBM;
    if (text == "LRM" || text == "lrm" || text == "L") return ModelKind::LRM;
    if (text == "KNN" || text == "knn" || text == "K") return ModelKind::KNN;
    if (text == "SVM" || text == "svm" || text == "S") return ModelKind::SVM;
    throw ValidationError("unknown model kind '" + std::string(text) + "'");
}

char model_code(ModelKind kind) { return to_string(kind).front(); }

TrainedModel train_model(ModelKind kind, const FeatureMatrix& train, const TrainConfig& config) {
    switch (kind) {
        case ModelKind::GBM: return train_gbm(train, config);
        case ModelKind::LRM: return train_lrm(train, config);
        case ModelKind::KNN: return train_knn(train, config);
        case ModelKind::SVM: return train_svm(train, config);
    }
    throw ValidationError("unknown model kind");
}

double decision_threshold(ModelKind kind) { return kind == ModelKind::KNN ? 0.5 : 0.0; }

namespace {

struct ScoreVisitor {
    const Rows& x;
    std::vector<double> operator()(const LrmParams& p) const {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (p.constant_probability) {
                const double q = std::clamp(*p.constant_probability, 1e-12, 1.0 - 1e-12);
                out[i] = std::log(q / (1.0 - q));
                continue;
            }
            double eta = p.intercept;
            for (std::size_t j = 0; j < p.weights.size(); ++j) eta += p.weights[j] * x[i][j];
            out[i] = eta;
        }
        return out;
    }
    std::vector<double> operator()(const KnnParams& p) const {
        std::vector<std::size_t> pool(p.x.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = knn_vote(p.x, p.y, pool, x[i], p.k);
        return out;
    }
    std::vector<double> operator()(const SvmParams& p) const {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double f = -p.rho;
            for (std::size_t s = 0; s < p.support_vectors.size(); ++s)
                f += p.coef[s] * rbf_kernel(p.support_vectors[s], x[i], p.gamma);
            out[i] = f;
        }
        return out;
    }
    std::vector<double> operator()(const GbmParams& p) const {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double f = p.init;
            for (const auto& tree : p.trees) f += p.learning_rate * tree.predict(x[i]);
            out[i] = f;
        }
        return out;
    }
};

}  // namespace

std::vector<double> predict_score(const TrainedModel& model, const Rows& rows) {
    const Rows x = apply_standardizer(model.standardization, rows);
    return std::visit(ScoreVisitor{x}, model.params);
}

std::vector<double> predict_score(const TrainedModel& model, const FeatureMatrix& matrix) {
    if (matrix.set_id != model.feature_set)
        throw DimensionMismatchError("model expects " + std::string(to_string(model.feature_set)) + " features");
    return predict_score(model, matrix.rows);
}

std::vector<Label> predict_label(const TrainedModel& model, const Rows& rows) {
    const auto scores = predict_score(model, rows);
    const double cut = decision_threshold(model.kind);
    std::vector<Label> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= cut ? Label::T : Label::N;
    return out;
}

std::vector<Label> predict_label(const TrainedModel& model, const FeatureMatrix& matrix) {
    if (matrix.set_id != model.feature_set)
        throw DimensionMismatchError("model expects " + std::string(to_string(model.feature_set)) + " features");
    return predict_label(model, matrix.rows);
}

EvalReport evaluate(const TrainedModel& model, const FeatureMatrix& test) {
    if (test.rows.empty()) throw InsufficientDataError("cannot evaluate on an empty test set");
    const auto scores = predict_score(model, test);
    const double cut = decision_threshold(model.kind);
    std::vector<Label> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= cut ? Label::T : Label::N;
    return evaluate_predictions(scores, predicted, test.labels);
}

}  // namespace epiwarn
