// Gradient boosting on the logistic loss: depth-limited regression trees fit
// to the residuals y - p by exact greedy squared-error splits, leaves set by a
// single Newton step sum(r) / sum(p (1 - p)).

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epiwarn/errors.hpp"
#include "epiwarn/learners.hpp"

namespace epiwarn {

namespace {

double sigmoid(double eta) {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double mean_log_loss(const std::vector<double>& f, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        // log(1 + exp(f)) - y f, computed stably
        const double soft = f[i] > 0 ? f[i] + std::log1p(std::exp(-f[i])) : std::log1p(std::exp(f[i]));
        s += soft - y[i] * f[i];
    }
    return s / static_cast<double>(f.size());
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Rows& x, const std::vector<std::vector<std::size_t>>& sorted, const GbmConfig& config)
        : x_(x), sorted_(sorted), config_(config), node_of_(x.size(), -1) {}

    RegressionTree build(const std::vector<double>& residual, const std::vector<double>& hess) {
        residual_ = &residual;
        hess_ = &hess;
        tree_ = RegressionTree{};
        std::vector<std::size_t> all(x_.size());
        std::iota(all.begin(), all.end(), 0);
        grow(all, 0);
        return std::move(tree_);
    }

private:
    int grow(const std::vector<std::size_t>& members, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{});
        double sum_r = 0.0, sum_h = 0.0;
        for (std::size_t i : members) {
            sum_r += (*residual_)[i];
            sum_h += (*hess_)[i];
        }
        const SplitCandidate split = depth < config_.max_depth ? best_split(members, sum_r) : SplitCandidate{};
        if (split.feature < 0) {
            tree_.nodes[id].value = sum_h < 1e-150 ? 0.0 : sum_r / sum_h;
            return id;
        }
        std::vector<std::size_t> left, right;
        for (std::size_t i : members)
            (x_[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
        tree_.nodes[id].feature = split.feature;
        tree_.nodes[id].threshold = split.threshold;
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    SplitCandidate best_split(const std::vector<std::size_t>& members, double sum_r) {
        const std::size_t n = members.size();
        const auto min_leaf = static_cast<std::size_t>(std::max(1, config_.min_samples_leaf));
        SplitCandidate best;
        if (n < 2 * min_leaf) return best;
        const int mark = ++stamp_;
        for (std::size_t i : members) node_of_[i] = mark;
        const double parent = sum_r * sum_r / static_cast<double>(n);
        std::vector<std::size_t> ordered;
        ordered.reserve(n);
        for (std::size_t f = 0; f < sorted_.size(); ++f) {
            ordered.clear();
            for (std::size_t i : sorted_[f])
                if (node_of_[i] == mark) ordered.push_back(i);
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += (*residual_)[ordered[k]];
                const double v = x_[ordered[k]][f];
                const double next = x_[ordered[k + 1]][f];
                const std::size_t nl = k + 1;
                const std::size_t nr = n - nl;
                if (v == next || nl < min_leaf || nr < min_leaf) continue;
                const double right_sum = sum_r - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                    right_sum * right_sum / static_cast<double>(nr) - parent;
                if (gain > best.gain + 1e-12) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = v + (next - v) / 2.0;
                    if (!(best.threshold < next)) best.threshold = v;
                }
            }
        }
        return best;
    }

    const Rows& x_;
    const std::vector<std::vector<std::size_t>>& sorted_;
    const GbmConfig& config_;
    std::vector<int> node_of_;
    int stamp_ = 0;
    const std::vector<double>* residual_ = nullptr;
    const std::vector<double>* hess_ = nullptr;
    RegressionTree tree_;
};

}  // namespace

double RegressionTree::predict(const std::vector<double>& x) const {
    int id = 0;
    while (nodes[static_cast<std::size_t>(id)].feature >= 0) {
        const TreeNode& node = nodes[static_cast<std::size_t>(id)];
        id = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(id)].value;
}

TrainedModel train_gbm(const FeatureMatrix& train, const TrainConfig& config) {
    TrainedModel model;
    model.kind = ModelKind::GBM;
    model.feature_set = train.set_id;
    model.feature_names = train.names;
    model.config = config;
    model.standardization = fit_standardizer(train.rows, false);
    const Rows x = apply_standardizer(model.standardization, train.rows);
    const std::size_t n = x.size();
    const std::size_t d = model.standardization.kept.size();

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = train.labels[i] == Label::T ? 1.0 : 0.0;
    const double rate = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    GbmParams params;
    params.learning_rate = config.gbm.learning_rate;
    const double clipped = std::clamp(rate, 1e-12, 1.0 - 1e-12);
    params.init = std::log(clipped / (1.0 - clipped));
    std::vector<double> f(n, params.init);
    params.loss_history.push_back(mean_log_loss(f, y));
    if (rate == 0.0 || rate == 1.0) {
        model.warnings.push_back("single-class training data: constant model at class log-odds");
        model.params = std::move(params);
        return model;
    }

    std::vector<std::vector<std::size_t>> sorted(d);
    for (std::size_t j = 0; j < d; ++j) {
        sorted[j].resize(n);
        std::iota(sorted[j].begin(), sorted[j].end(), 0);
        std::stable_sort(sorted[j].begin(), sorted[j].end(), [&](std::size_t a, std::size_t b) { return x[a][j] < x[b][j]; });
    }

    TreeBuilder builder(x, sorted, config.gbm);
    std::vector<double> residual(n), hess(n);
    for (int round = 0; round < config.gbm.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(f[i]);
            residual[i] = y[i] - p;
            hess[i] = p * (1.0 - p);
        }
        RegressionTree tree = builder.build(residual, hess);
        for (std::size_t i = 0; i < n; ++i) f[i] += params.learning_rate * tree.predict(x[i]);
        params.trees.push_back(std::move(tree));
        params.loss_history.push_back(mean_log_loss(f, y));
    }
    model.params = std::move(params);
    return model;
}

}  // namespace epiwarn
