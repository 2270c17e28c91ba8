#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epiwarn/dataset.hpp"

namespace epiwarn {

/// Midranks (1-based, ties averaged) of `values`.
std::vector<double> midranks(std::span<const double> values);

/// Rank-sum AUC: P(score_T > score_N) + 0.5 P(tie).
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

/// DeLong structural components of one ROC curve.
struct DelongComponents {
    double auc = 0.0;
    std::vector<double> v10;  // one per positive (T)
    std::vector<double> v01;  // one per negative (N)
};

DelongComponents delong_components(std::span<const double> scores, std::span<const Label> labels);
double delong_variance(const DelongComponents& c);

/// Half-width of the DeLong confidence interval for the AUC.
double auc_ci(std::span<const double> scores, std::span<const Label> labels, double level = 0.95);

struct DelongResult {
    double auc_a = 0.0;
    double auc_b = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Paired test: both score vectors rank the same labelled samples.
DelongResult delong_test(std::span<const double> scores_a, std::span<const double> scores_b,
                         std::span<const Label> labels);

/// Unpaired test: independent AUC estimates from distinct sample sets.
DelongResult delong_test_unpaired(std::span<const double> scores_a, std::span<const Label> labels_a,
                                  std::span<const double> scores_b, std::span<const Label> labels_b);

enum class Alternative { TwoSided, Less, Greater };
enum class MwuMethod { Auto, Exact, Normal };

struct MannWhitneyResult {
    double u = 0.0;  // statistic for x: #(x > y) + 0.5 #(x == y)
    double p_value = 1.0;
    bool exact = false;
};

/// Auto uses the exact null distribution when there are no ties and both
/// samples have fewer than 50 points, otherwise the tie-corrected normal
/// approximation with continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                                 Alternative alternative = Alternative::TwoSided, MwuMethod method = MwuMethod::Auto);

/// Wald binomial interval half-width z_{(1+level)/2} sqrt(p(1-p)/n).
double accuracy_ci(double p_hat, std::size_t n, double level = 0.95);

/// Standard normal quantile.
double normal_quantile(double p);
/// Two-sided normal p-value for a z statistic.
double two_sided_p(double z);

struct EvalReport {
    std::string classifier;
    std::string dataset;
    std::optional<double> auc;  // absent when the test set is single-class
    std::optional<double> auc_ci_halfwidth;
    double accuracy = 0.0;
    double accuracy_ci_halfwidth = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
};

/// Accuracy, confusion counts and (when both labels are present) AUC with its
/// DeLong half-width from precomputed scores and predicted labels.
EvalReport evaluate_predictions(std::span<const double> scores, std::span<const Label> predicted,
                                std::span<const Label> truth);

}  // namespace epiwarn
