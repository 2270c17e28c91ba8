// C-SVC with an RBF kernel, trained by SMO using second-order working-set
// selection (maximal violating pair refined by the gain bound).

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <unordered_map>

#include "epiwarn/errors.hpp"
#include "learner_internal.hpp"

namespace epiwarn {

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return std::exp(-gamma * s);
}

namespace {

constexpr double kTau = 1e-12;

// Rows of Q_ij = y_i y_j K(x_i, x_j), computed on demand and cached FIFO.
class KernelRows {
public:
    KernelRows(const Rows& x, const std::vector<double>& y, double gamma, std::size_t cache_mb)
        : x_(x), y_(y), gamma_(gamma) {
        const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
        capacity_ = std::max<std::size_t>(2, cache_mb * 1024 * 1024 / row_bytes);
    }

    using RowPtr = std::shared_ptr<const std::vector<double>>;

    RowPtr row(std::size_t i) {
        if (auto it = cache_.find(i); it != cache_.end()) return it->second;
        if (cache_.size() >= capacity_) {
            cache_.erase(order_.front());
            order_.pop_front();
        }
        std::vector<double> r(x_.size());
        for (std::size_t j = 0; j < x_.size(); ++j) r[j] = y_[i] * y_[j] * rbf_kernel(x_[i], x_[j], gamma_);
        order_.push_back(i);
        auto ptr = std::make_shared<const std::vector<double>>(std::move(r));
        cache_.emplace(i, ptr);
        return ptr;
    }

private:
    const Rows& x_;
    const std::vector<double>& y_;
    double gamma_;
    std::size_t capacity_;
    std::unordered_map<std::size_t, RowPtr> cache_;
    std::deque<std::size_t> order_;
};

bool in_up(double y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(double y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

}  // namespace

TrainedModel train_svm(const FeatureMatrix& train, const TrainConfig& config) {
    TrainedModel model;
    model.kind = ModelKind::SVM;
    model.feature_set = train.set_id;
    model.feature_names = train.names;
    model.config = config;
    model.standardization = fit_standardizer(train.rows, true);
    const Rows x = apply_standardizer(model.standardization, train.rows);
    const std::size_t n = x.size();

    const auto n_pos = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), Label::T));
    if (n_pos == 0 || n_pos == n) throw InsufficientDataError("SVM needs both classes in the training data");
    if (model.standardization.kept.empty()) throw DegenerateInputError("no non-constant feature to train an SVM on");

    const double c = config.svm.c;
    const double gamma =
        config.svm.gamma > 0.0 ? config.svm.gamma : 1.0 / static_cast<double>(model.standardization.kept.size());
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = train.labels[i] == Label::T ? 1.0 : -1.0;

    KernelRows q(x, y, gamma, config.svm.cache_mb);
    std::vector<double> qd(n, 1.0);  // K(x, x) = 1
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a

    SvmParams params;
    params.gamma = gamma;
    params.c = c;

    auto objective = [&] {
        double f = 0.0;
        for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
        return -0.5 * f;  // dual objective e'a - 1/2 a'Qa
    };
    if (config.svm.record_objective) params.objective_history.push_back(objective());

    long iter = 0;
    double gap = 0.0;
    for (; iter < config.svm.max_iterations; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t i = -1;
        for (std::size_t t = 0; t < n; ++t)
            if (in_up(y[t], alpha[t], c) && -y[t] * grad[t] >= gmax) {
                if (-y[t] * grad[t] > gmax || i < 0) {
                    gmax = -y[t] * grad[t];
                    i = static_cast<std::ptrdiff_t>(t);
                }
            }
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t j = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        const KernelRows::RowPtr qi = i >= 0 ? q.row(static_cast<std::size_t>(i)) : nullptr;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(y[t], alpha[t], c)) continue;
            gmax2 = std::max(gmax2, y[t] * grad[t]);
            if (i < 0) continue;
            const double b = gmax + y[t] * grad[t];
            if (b > 0) {
                const double a_raw = qd[static_cast<std::size_t>(i)] + qd[t] -
                                     2.0 * y[static_cast<std::size_t>(i)] * y[t] * (*qi)[t];
                const double a = a_raw > 0 ? a_raw : kTau;
                const double obj = -(b * b) / a;
                if (obj < best_obj) {
                    best_obj = obj;
                    j = static_cast<std::ptrdiff_t>(t);
                }
            }
        }
        gap = gmax + gmax2;
        if (i < 0 || j < 0 || gap < config.svm.tolerance) break;

        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        const KernelRows::RowPtr row_i_ptr = q.row(ui);
        const KernelRows::RowPtr row_j_ptr = q.row(uj);
        const std::vector<double>& row_i = *row_i_ptr;
        const std::vector<double>& row_j = *row_j_ptr;
        const double old_ai = alpha[ui];
        const double old_aj = alpha[uj];

        if (y[ui] != y[uj]) {
            double quad = qd[ui] + qd[uj] + 2.0 * row_i[uj];
            if (quad <= 0) quad = kTau;
            const double delta = (-grad[ui] - grad[uj]) / quad;
            const double diff = alpha[ui] - alpha[uj];
            alpha[ui] += delta;
            alpha[uj] += delta;
            if (diff > 0) {
                if (alpha[uj] < 0) {
                    alpha[uj] = 0;
                    alpha[ui] = diff;
                }
            } else if (alpha[ui] < 0) {
                alpha[ui] = 0;
                alpha[uj] = -diff;
            }
            if (diff > 0) {
                if (alpha[ui] > c) {
                    alpha[ui] = c;
                    alpha[uj] = c - diff;
                }
            } else if (alpha[uj] > c) {
                alpha[uj] = c;
                alpha[ui] = c + diff;
            }
        } else {
            double quad = qd[ui] + qd[uj] - 2.0 * row_i[uj];
            if (quad <= 0) quad = kTau;
            const double delta = (grad[ui] - grad[uj]) / quad;
            const double sum = alpha[ui] + alpha[uj];
            alpha[ui] -= delta;
            alpha[uj] += delta;
            if (sum > c) {
                if (alpha[ui] > c) {
                    alpha[ui] = c;
                    alpha[uj] = sum - c;
                }
            } else if (alpha[uj] < 0) {
                alpha[uj] = 0;
                alpha[ui] = sum;
            }
            if (sum > c) {
                if (alpha[uj] > c) {
                    alpha[uj] = c;
                    alpha[ui] = sum - c;
                }
            } else if (alpha[ui] < 0) {
                alpha[ui] = 0;
                alpha[uj] = sum;
            }
        }
        const double dai = alpha[ui] - old_ai;
        const double daj = alpha[uj] - old_aj;
        for (std::size_t t = 0; t < n; ++t) grad[t] += row_i[t] * dai + row_j[t] * daj;
        if (config.svm.record_objective) params.objective_history.push_back(objective());
    }
    if (iter >= config.svm.max_iterations) model.warnings.push_back("SMO reached the iteration limit");

    // Offset from free vectors, else midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    params.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    params.iterations = iter;
    params.kkt_gap = gap;
    params.alpha = alpha;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            params.support_vectors.push_back(x[t]);
            params.coef.push_back(alpha[t] * y[t]);
        }
    }
    model.params = std::move(params);
    return model;
}

double svm_kkt_violation(const SvmParams& params, const Rows& x, const std::vector<Label>& labels) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == Label::T ? 1.0 : -1.0;
    std::vector<double> grad(n, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (params.alpha[i] == 0.0) continue;
        for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * y[i] * rbf_kernel(x[t], x[i], params.gamma) * params.alpha[i];
    }
    double up = -std::numeric_limits<double>::infinity();
    double low = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        if (in_up(y[t], params.alpha[t], params.c)) up = std::max(up, -y[t] * grad[t]);
        if (in_low(y[t], params.alpha[t], params.c)) low = std::max(low, y[t] * grad[t]);
    }
    return up + low;
}

double svm_dual_objective(const SvmParams& params, const Rows& x, const std::vector<Label>& labels) {
    const std::size_t n = x.size();
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += params.alpha[i];
        if (params.alpha[i] == 0.0) continue;
        const double yi = labels[i] == Label::T ? 1.0 : -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (params.alpha[j] == 0.0) continue;
            const double yj = labels[j] == Label::T ? 1.0 : -1.0;
            quad += params.alpha[i] * params.alpha[j] * yi * yj * rbf_kernel(x[i], x[j], params.gamma);
        }
    }
    return lin - 0.5 * quad;
}

}  // namespace epiwarn
