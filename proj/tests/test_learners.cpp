#include "doctest.h"

#include <cmath>

#include "epiwarn/errors.hpp"
#include "epiwarn/learners.hpp"
#include "epiwarn/metrics.hpp"
#include "support.hpp"

using namespace epiwarn;
using L = Label;

namespace {

FeatureMatrix matrix(Rows rows, std::vector<L> labels) {
    FeatureMatrix m;
    m.set_id = FeatureSet::EWSI5;
    for (std::size_t j = 0; j < rows.front().size(); ++j) m.names.push_back("f" + std::to_string(j));
    m.rows = std::move(rows);
    m.labels = std::move(labels);
    for (std::size_t i = 0; i < m.rows.size(); ++i) m.ids.push_back("r" + std::to_string(i));
    return m;
}

FeatureMatrix blobs(std::uint64_t seed, int per_class, double sep) {
    CounterRng rng(seed, 0);
    Rows rows;
    std::vector<L> y;
    for (int i = 0; i < 2 * per_class; ++i) {
        const bool t = i % 2 == 0;
        rows.push_back({(t ? sep : -sep) + rng.normal(), (t ? sep : -sep) + rng.normal()});
        y.push_back(t ? L::T : L::N);
    }
    return matrix(rows, y);
}

double train_accuracy(const TrainedModel& m, const FeatureMatrix& x) {
    const auto pred = predict_label(m, x);
    int ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == x.labels[i];
    return static_cast<double>(ok) / pred.size();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_CASE("standardizer") {
    const Rows train = {{1.0, 7.0}, {3.0, 7.0}};
    const auto st = fit_standardizer(train);
    CHECK(st.kept == std::vector<std::size_t>{0});
    CHECK(st.dropped == std::vector<std::size_t>{1});
    CHECK(st.mean[0] == 2.0);
    CHECK(st.sd[0] == doctest::Approx(std::sqrt(2.0)));
    const auto z = apply_standardizer(st, train);
    CHECK(z[0][0] == doctest::Approx(-0.70710678));
    CHECK(z[1][0] == doctest::Approx(0.70710678));
    const auto big = blobs(3, 30, 1.0);
    const auto zs = apply_standardizer(fit_standardizer(big.rows), big.rows);
    for (std::size_t j = 0; j < 2; ++j) {
        double m = 0;
        for (const auto& r : zs) m += r[j];
        CHECK(std::abs(m / zs.size()) < 1e-12);
    }
    CHECK_THROWS_AS(apply_standardizer(st, Rows{{1.0}}), DimensionMismatchError);
}

TEST_CASE("logistic regression") {
    Rows rows;
    std::vector<L> y;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({-1.0});
        y.push_back(L::N);
        rows.push_back({1.0});
        y.push_back(L::T);
    }
    // symmetric toy with label noise so the MLE is finite
    rows.push_back({-1.0});
    y.push_back(L::T);
    rows.push_back({1.0});
    y.push_back(L::N);
    const auto m = train_lrm(matrix(rows, y), {});
    CHECK(sigmoid(predict_score(m, Rows{{0.0}})[0]) == doctest::Approx(0.5).epsilon(1e-9));

    const auto sep = blobs(1, 10, 3.0);
    CHECK(train_accuracy(train_lrm(sep, {}), sep) == 1.0);

    const auto one = matrix({{1.0}, {2.0}, {3.0}}, {L::T, L::T, L::T});
    const auto c = train_lrm(one, {});
    CHECK_FALSE(c.warnings.empty());
    CHECK(sigmoid(predict_score(c, Rows{{5.0}})[0]) == doctest::Approx(1.0).epsilon(1e-9));

    TrainedModel zero = train_lrm(sep, {});
    auto& p = std::get<LrmParams>(zero.params);
    std::fill(p.weights.begin(), p.weights.end(), 0.0);
    p.intercept = 0.0;
    for (double s : predict_score(zero, sep)) CHECK(sigmoid(s) == 0.5);
}

TEST_CASE("k nearest neighbours") {
    const auto five = matrix({{0, 0}, {1, 0}, {0, 2}, {3, 3}, {4, 1}}, {L::T, L::T, L::N, L::N, L::T});
    TrainConfig cfg;
    cfg.knn.k = 1;
    auto m = train_knn(five, cfg);
    const auto own = predict_score(m, five);
    for (std::size_t i = 0; i < 5; ++i) CHECK(own[i] == (five.labels[i] == L::T ? 1.0 : 0.0));
    CHECK(train_accuracy(m, five) == 1.0);

    cfg.knn.k = 3;
    m = train_knn(five, cfg);
    const auto st = fit_standardizer(five.rows);
    const auto zs = apply_standardizer(st, five.rows);
    const Rows queries = {{0.5, 0.5}, {3.0, 2.0}, {1.0, 1.5}};
    const auto zq = apply_standardizer(st, queries);
    const auto got = predict_score(m, queries);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        std::vector<std::pair<double, L>> d;
        for (std::size_t i = 0; i < 5; ++i)
            d.push_back({std::hypot(zs[i][0] - zq[q][0], zs[i][1] - zq[q][1]), five.labels[i]});
        std::sort(d.begin(), d.end(), [](auto& a, auto& b) { return a.first < b.first; });
        const double kth = d[2].first;
        int in = 0, pos = 0;
        for (auto& [dist, l] : d)
            if (dist <= kth + 1e-12) {
                ++in;
                pos += l == L::T;
            }
        CHECK(got[q] == doctest::Approx(static_cast<double>(pos) / in));
    }

    // four training points equidistant from the query: all are counted
    const auto ring = matrix({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}, {L::T, L::N, L::N, L::N});
    cfg.knn.k = 2;
    CHECK(predict_score(train_knn(ring, cfg), Rows{{0.0, 0.0}})[0] == 0.25);

    cfg.knn.k = 9;
    CHECK_THROWS_AS(train_knn(five, cfg), ValidationError);

    const auto cv = train_knn(blobs(2, 40, 1.5), {});
    const auto& kp = std::get<KnnParams>(cv.params);
    CHECK(kp.k % 2 == 1);
    CHECK(kp.cv_accuracy.size() == 6);
}

TEST_CASE("support vector machine") {
    const auto sep = blobs(5, 10, 3.0);
    TrainConfig cfg;
    cfg.svm.record_objective = true;
    const auto m = train_svm(sep, cfg);
    CHECK(train_accuracy(m, sep) == 1.0);
    const auto& p = std::get<SvmParams>(m.params);
    const auto zs = apply_standardizer(m.standardization, sep.rows);
    CHECK(svm_kkt_violation(p, zs, sep.labels) <= cfg.svm.tolerance * 1.0001);
    for (double a : p.alpha) {
        CHECK(a >= -1e-12);
        CHECK(a <= cfg.svm.c + 1e-12);
    }
    for (std::size_t i = 1; i < p.objective_history.size(); ++i)
        CHECK(p.objective_history[i] >= p.objective_history[i - 1] - 1e-9);
    CHECK(svm_dual_objective(p, zs, sep.labels) == doctest::Approx(p.objective_history.back()).epsilon(1e-9));

    // the same point with both labels, plus a spread of others
    Rows rows = {{0.0, 0.0}, {0.0, 0.0}, {2, 2}, {-2, -2}, {2, -2}, {-2, 2}};
    const auto conflict = matrix(rows, {L::T, L::N, L::T, L::N, L::T, L::N});
    const auto mc = train_svm(conflict, {});
    CHECK(std::abs(predict_score(mc, Rows{{0.0, 0.0}})[0]) < 0.1);

    CHECK_THROWS_AS(train_svm(matrix({{1.0}, {2.0}}, {L::T, L::T}), {}), InsufficientDataError);
}

TEST_CASE("gradient boosting") {
    // feature 1 is perfectly predictive, feature 0 is noise
    CounterRng rng(8, 0);
    Rows rows;
    std::vector<L> y;
    for (int i = 0; i < 40; ++i) {
        const bool t = i % 2 == 0;
        rows.push_back({rng.normal(), t ? 1.0 : 0.0});
        y.push_back(t ? L::T : L::N);
    }
    const auto fm = matrix(rows, y);
    TrainConfig cfg;
    cfg.gbm.rounds = 5;
    const auto m = train_gbm(fm, cfg);
    const auto& gp = std::get<GbmParams>(m.params);
    CHECK(gp.trees.front().nodes.front().feature == 1);
    CHECK(gp.trees.front().nodes.front().threshold == 0.5);
    CHECK(train_accuracy(m, fm) == 1.0);
    for (std::size_t i = 1; i < gp.loss_history.size(); ++i) CHECK(gp.loss_history[i] < gp.loss_history[i - 1]);

    const auto all_t = train_gbm(matrix({{1.0}, {2.0}, {3.0}}, {L::T, L::T, L::T}), {});
    CHECK(sigmoid(predict_score(all_t, Rows{{0.0}})[0]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(predict_label(all_t, Rows{{0.0}})[0] == L::T);
}

TEST_CASE("gradient boosting root split matches exhaustive stump search") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        CounterRng rng(31, s);
        Rows rows;
        std::vector<L> y;
        for (int i = 0; i < 8; ++i) {
            rows.push_back({std::round(rng.normal() * 100) / 100, std::round(rng.normal() * 100) / 100});
            y.push_back(i < 3 || (i >= 5 && rng.uniform() < 0.5) ? L::T : L::N);
        }
        const auto fm = matrix(rows, y);
        TrainConfig cfg;
        cfg.gbm.rounds = 1;
        cfg.gbm.min_samples_leaf = 1;
        const auto m = train_gbm(fm, cfg);

        double rate = 0;
        for (L l : y) rate += l == L::T;
        rate /= 8;
        double best = 0.0;
        int best_f = -1, n_best = 0;
        double best_thr = 0.0;
        for (int f = 0; f < 2; ++f)
            for (const auto& cand : rows)
                for (const auto& next : rows) {
                    if (!(next[f] > cand[f])) continue;
                    bool adjacent = true;
                    for (const auto& r : rows)
                        if (r[f] > cand[f] && r[f] < next[f]) adjacent = false;
                    if (!adjacent) continue;
                    const double thr = cand[f] + (next[f] - cand[f]) / 2;
                    double sl = 0, sr = 0;
                    int nl = 0, nr = 0;
                    for (std::size_t i = 0; i < 8; ++i) {
                        const double r = (y[i] == L::T ? 1.0 : 0.0) - rate;
                        if (rows[i][f] <= thr) {
                            sl += r;
                            ++nl;
                        } else {
                            sr += r;
                            ++nr;
                        }
                    }
                    double st = 0;
                    for (L l : y) st += (l == L::T ? 1.0 : 0.0) - rate;
                    const double gain = sl * sl / nl + sr * sr / nr - st * st / 8;
                    if (gain > best + 1e-12) {
                        best = gain;
                        best_f = f;
                        best_thr = thr;
                        n_best = 1;
                    } else if (std::abs(gain - best) <= 1e-12) {
                        ++n_best;
                    }
                }
        const auto& root = std::get<GbmParams>(m.params).trees.front().nodes.front();
        const double root_gain = [&] {
            double sl = 0, sr = 0;
            int nl = 0, nr = 0;
            for (std::size_t i = 0; i < 8; ++i) {
                const double r = (y[i] == L::T ? 1.0 : 0.0) - rate;
                (rows[i][static_cast<std::size_t>(root.feature)] <= root.threshold ? sl : sr) += r;
                (rows[i][static_cast<std::size_t>(root.feature)] <= root.threshold ? nl : nr) += 1;
            }
            return sl * sl / nl + sr * sr / nr;
        }();
        INFO("seed " << s);
        CHECK(root.feature >= 0);
        // ties between equally good stumps may resolve to either; the gain must be optimal
        CHECK(root_gain - 0.0 == doctest::Approx(best + [&] {
                  double st = 0;
                  for (L l : y) st += (l == L::T ? 1.0 : 0.0) - rate;
                  return st * st / 8;
              }()));
        if (n_best == 1) {
            CHECK(root.feature == best_f);
            CHECK(root.threshold == doctest::Approx(best_thr));
        }
    }
}

TEST_CASE("training is deterministic and kinds round-trip") {
    const auto data = blobs(12, 30, 0.8);
    TrainConfig cfg;
    cfg.seed = 99;
    for (ModelKind k : {ModelKind::GBM, ModelKind::LRM, ModelKind::KNN, ModelKind::SVM}) {
        const auto a = train_model(k, data, cfg), b = train_model(k, data, cfg);
        CHECK(predict_score(a, data) == predict_score(b, data));
        CHECK(parse_model_kind(std::string(to_string(k))) == k);
    }
    CHECK(model_code(ModelKind::SVM) == 'S');
    CHECK(decision_threshold(ModelKind::KNN) == 0.5);
    CHECK(decision_threshold(ModelKind::LRM) == 0.0);
}
