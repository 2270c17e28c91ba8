#include <algorithm>
#include <numeric>

#include "epiwarn/errors.hpp"
#include "epiwarn/learners.hpp"
#include "epiwarn/rng.hpp"

namespace epiwarn {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

}  // namespace

/// Fraction of T among the k nearest rows of `x` (indices in `pool`). Rows
/// tied with the k-th distance are all included.
double knn_vote(const Rows& x, const std::vector<Label>& y, const std::vector<std::size_t>& pool,
                const std::vector<double>& query, int k) {
    std::vector<double> dist(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) dist[i] = squared_distance(x[pool[i]], query);
    std::vector<double> sorted = dist;
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    const double kth = sorted[static_cast<std::size_t>(k - 1)];
    std::size_t included = 0, positives = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (dist[i] <= kth) {
            ++included;
            if (y[pool[i]] == Label::T) ++positives;
        }
    }
    return static_cast<double>(positives) / static_cast<double>(included);
}

TrainedModel train_knn(const FeatureMatrix& train, const TrainConfig& config) {
    TrainedModel model;
    model.kind = ModelKind::KNN;
    model.feature_set = train.set_id;
    model.feature_names = train.names;
    model.config = config;
    model.standardization = fit_standardizer(train.rows, true);

    KnnParams params;
    params.x = apply_standardizer(model.standardization, train.rows);
    params.y = train.labels;
    const std::size_t n = params.x.size();

    if (config.knn.k > 0) {
        if (static_cast<std::size_t>(config.knn.k) > n)
            throw ValidationError("k = " + std::to_string(config.knn.k) + " exceeds training size " +
                                  std::to_string(n));
        params.k = config.knn.k;
        model.params = std::move(params);
        return model;
    }

    // k by cross-validated accuracy; ties go to the smallest k.
    const int folds = std::max(2, config.knn.folds);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(config.seed, 0x6b6eULL);
    shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

    int best_k = -1;
    double best_acc = -1.0;
    for (int k : config.knn.grid) {
        std::size_t correct = 0, total = 0;
        bool feasible = true;
        for (int f = 0; f < folds && feasible; ++f) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < n; ++i)
                if (fold_of[i] != f) pool.push_back(i);
            if (pool.size() < static_cast<std::size_t>(k)) {
                feasible = false;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] != f) continue;
                const double vote = knn_vote(params.x, params.y, pool, params.x[i], k);
                const Label pred = vote >= 0.5 ? Label::T : Label::N;
                correct += pred == params.y[i] ? 1 : 0;
                ++total;
            }
        }
        const double acc = feasible && total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : -1.0;
        params.cv_accuracy.push_back(acc);
        if (feasible && acc > best_acc) {
            best_acc = acc;
            best_k = k;
        }
    }
    if (best_k < 0) {
        throw ValidationError("training set of " + std::to_string(n) + " rows too small for every k in the grid");
    }
    params.k = best_k;
    model.params = std::move(params);
    return model;
}

}  // namespace epiwarn
