#include "epiwarn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "epiwarn/errors.hpp"

namespace epiwarn {

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

void check_labels(std::span<const double> scores, std::span<const Label> labels, std::size_t& n_pos,
                  std::size_t& n_neg) {
    if (scores.size() != labels.size()) throw DimensionMismatchError("scores and labels differ in length");
    n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::T));
    n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InsufficientDataError("AUC undefined: only one class present");
}

double sample_variance_about(std::span<const double> v, double centre) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - centre) * (x - centre);
    return s / static_cast<double>(v.size() - 1);
}

double sample_covariance_about(std::span<const double> a, double ca, std::span<const double> b, double cb) {
    if (a.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ca) * (b[i] - cb);
    return s / static_cast<double>(a.size() - 1);
}

DelongResult finish(double auc_a, double auc_b, double var_diff) {
    DelongResult r;
    r.auc_a = auc_a;
    r.auc_b = auc_b;
    if (auc_a == 1.0 && auc_b == 1.0) return r;  // both perfect: p = 1 by convention
    const double diff = auc_a - auc_b;
    if (!(var_diff > 0.0)) {
        r.statistic = 0.0;
        r.p_value = diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.statistic = diff / std::sqrt(var_diff);
    r.p_value = two_sided_p(r.statistic);
    return r;
}

}  // namespace

double normal_quantile(double p) {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

double two_sided_p(double z) {
    static const boost::math::normal_distribution<double> standard;
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(standard, std::abs(z))));
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    std::size_t n_pos = 0, n_neg = 0;
    check_labels(scores, labels, n_pos, n_neg);
    const auto ranks = midranks(scores);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (labels[i] == Label::T) rank_sum += ranks[i];
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

DelongComponents delong_components(std::span<const double> scores, std::span<const Label> labels) {
    std::size_t n_pos = 0, n_neg = 0;
    check_labels(scores, labels, n_pos, n_neg);
    std::vector<double> pos, neg;
    pos.reserve(n_pos);
    neg.reserve(n_neg);
    for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == Label::T ? pos : neg).push_back(scores[i]);

    const auto all_ranks = midranks(scores);
    const auto pos_ranks = midranks(pos);
    const auto neg_ranks = midranks(neg);

    DelongComponents c;
    c.v10.resize(n_pos);
    c.v01.resize(n_neg);
    std::size_t ip = 0, in = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == Label::T) {
            // Negatives ranked below this positive (ties count half).
            c.v10[ip] = (all_ranks[i] - pos_ranks[ip]) / static_cast<double>(n_neg);
            ++ip;
        } else {
            // Positives ranked above this negative.
            c.v01[in] = 1.0 - (all_ranks[i] - neg_ranks[in]) / static_cast<double>(n_pos);
            ++in;
        }
    }
    c.auc = std::accumulate(c.v10.begin(), c.v10.end(), 0.0) / static_cast<double>(n_pos);
    return c;
}

double delong_variance(const DelongComponents& c) {
    return sample_variance_about(c.v10, c.auc) / static_cast<double>(c.v10.size()) +
           sample_variance_about(c.v01, c.auc) / static_cast<double>(c.v01.size());
}

double auc_ci(std::span<const double> scores, std::span<const Label> labels, double level) {
    if (!(level >= 0.0 && level < 1.0)) throw ValidationError("confidence level must be in [0, 1)");
    const auto c = delong_components(scores, labels);
    if (level == 0.0) return 0.0;
    return normal_quantile(0.5 + level / 2.0) * std::sqrt(std::max(0.0, delong_variance(c)));
}

DelongResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const Label> labels) {
    if (scores_a.size() != scores_b.size()) throw DimensionMismatchError("paired DeLong needs equal-length scores");
    const auto a = delong_components(scores_a, labels);
    const auto b = delong_components(scores_b, labels);
    const double m = static_cast<double>(a.v10.size());
    const double n = static_cast<double>(a.v01.size());
    const double cov = sample_covariance_about(a.v10, a.auc, b.v10, b.auc) / m +
                       sample_covariance_about(a.v01, a.auc, b.v01, b.auc) / n;
    return finish(a.auc, b.auc, delong_variance(a) + delong_variance(b) - 2.0 * cov);
}

DelongResult delong_test_unpaired(std::span<const double> scores_a, std::span<const Label> labels_a,
                                  std::span<const double> scores_b, std::span<const Label> labels_b) {
    const auto a = delong_components(scores_a, labels_a);
    const auto b = delong_components(scores_b, labels_b);
    return finish(a.auc, b.auc, delong_variance(a) + delong_variance(b));
}

namespace {

// Null pmf of U for untied samples of sizes n1, n2: count the n1-subsets of
// ranks 1..n1+n2 by their rank sum.
std::vector<double> exact_u_distribution(std::size_t n1, std::size_t n2) {
    const std::size_t n = n1 + n2;
    const std::size_t max_sum = n1 * n;
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t rank = 1; rank <= n; ++rank)
        for (std::size_t k = std::min(rank, n1); k >= 1; --k)
            for (std::size_t s = max_sum; s >= rank; --s) ways[k][s] += ways[k - 1][s - rank];
    const std::size_t offset = n1 * (n1 + 1) / 2;
    std::vector<double> pmf(n1 * n2 + 1, 0.0);
    for (std::size_t u = 0; u < pmf.size(); ++u) pmf[u] = ways[n1][u + offset];
    const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    for (double& p : pmf) p /= total;
    return pmf;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y, Alternative alternative,
                                 MwuMethod method) {
    if (x.empty() || y.empty()) throw InsufficientDataError("Mann-Whitney U needs two non-empty samples");
    std::vector<double> all(x.begin(), x.end());
    all.insert(all.end(), y.begin(), y.end());
    const auto ranks = midranks(all);
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    double rx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rx += ranks[i];

    MannWhitneyResult r;
    r.u = rx - n1 * (n1 + 1.0) / 2.0;

    // Tie structure.
    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1) ties = true;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    const bool use_exact = method == MwuMethod::Exact || (method == MwuMethod::Auto && !ties && x.size() < 50 &&
                                                          y.size() < 50);
    if (use_exact) {
        if (ties) throw ValidationError("exact Mann-Whitney p-value requires untied data");
        const auto pmf = exact_u_distribution(x.size(), y.size());
        const auto u = static_cast<std::size_t>(std::llround(r.u));
        double lower = 0.0, upper = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            if (k <= u) lower += pmf[k];
            if (k >= u) upper += pmf[k];
        }
        switch (alternative) {
            case Alternative::TwoSided: r.p_value = std::min(1.0, 2.0 * std::min(lower, upper)); break;
            case Alternative::Less: r.p_value = lower; break;
            case Alternative::Greater: r.p_value = upper; break;
        }
        r.exact = true;
        return r;
    }

    const double n = n1 + n2;
    const double mean_u = n1 * n2 / 2.0;
    const double var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var_u > 0.0)) {
        r.p_value = 1.0;
        return r;
    }
    const double sd = std::sqrt(var_u);
    const double delta = r.u - mean_u;
    static const boost::math::normal_distribution<double> standard;
    switch (alternative) {
        case Alternative::TwoSided: {
            const double correction = delta > 0 ? 0.5 : (delta < 0 ? -0.5 : 0.0);
            r.p_value = two_sided_p((delta - correction) / sd);
            break;
        }
        case Alternative::Greater:
            r.p_value = boost::math::cdf(boost::math::complement(standard, (delta - 0.5) / sd));
            break;
        case Alternative::Less:
            r.p_value = boost::math::cdf(standard, (delta + 0.5) / sd);
            break;
    }
    return r;
}

double accuracy_ci(double p_hat, std::size_t n, double level) {
    if (n == 0) throw ValidationError("accuracy interval needs n >= 1");
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw ValidationError("accuracy must lie in [0, 1]");
    if (!(level >= 0.0 && level < 1.0)) throw ValidationError("confidence level must be in [0, 1)");
    if (level == 0.0) return 0.0;
    return normal_quantile(0.5 + level / 2.0) * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

EvalReport evaluate_predictions(std::span<const double> scores, std::span<const Label> predicted,
                                std::span<const Label> truth) {
    if (truth.empty()) throw InsufficientDataError("cannot evaluate on an empty test set");
    if (scores.size() != truth.size() || predicted.size() != truth.size())
        throw DimensionMismatchError("scores, predictions and labels differ in length");
    EvalReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == Label::T) {
            ++r.n_pos;
            (predicted[i] == Label::T ? r.tp : r.fn) += 1;
        } else {
            ++r.n_neg;
            (predicted[i] == Label::N ? r.tn : r.fp) += 1;
        }
    }
    const std::size_t n = truth.size();
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(n);
    r.accuracy_ci_halfwidth = accuracy_ci(r.accuracy, n);
    if (r.n_pos > 0 && r.n_neg > 0) {
        r.auc = roc_auc(scores, truth);
        r.auc_ci_halfwidth = auc_ci(scores, truth);
    }
    return r;
}

}  // namespace epiwarn
