#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epiwarn/dataset.hpp"

namespace epiwarn {

enum class FeatureSet { SF22, EWSI5 };

std::string_view to_string(FeatureSet set);
FeatureSet parse_feature_set(std::string_view text);
/// "22" or "5", as used in classifier names.
std::string_view feature_code(FeatureSet set);

const std::vector<std::string>& feature_names(FeatureSet set);

struct FeatureVector {
    std::vector<double> values;
    FeatureSet set_id = FeatureSet::EWSI5;
};

struct FeatureMatrix {
    FeatureSet set_id = FeatureSet::EWSI5;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    std::vector<std::string> ids;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return names.size(); }
};

/// Mean 0, sample sd 1. Throws DegenerateInputError for constant input.
std::vector<double> z_normalize(std::span<const double> series);

/// [SD, CV (%), AR1, skewness, kurtosis].
FeatureVector compute_ewsi5(std::span<const double> series);

/// The 22 catch22 statistics, computed on the z-scored series.
FeatureVector compute_sf22(std::span<const double> series);

FeatureVector compute_features(std::span<const double> series, FeatureSet set);

struct FeatureFailure {
    std::string window_id;
    std::string message;
};

struct FeaturizeResult {
    FeatureMatrix matrix;
    std::vector<FeatureFailure> failures;
};

/// One row per window in input order. With fail_fast, the first degenerate
/// window throws; otherwise degenerate windows are skipped and reported.
FeaturizeResult featurize(const WindowSet& windows, FeatureSet set, bool fail_fast = true);

namespace catch22 {

// Each function expects an already z-scored series. Undefined results map to
// the sentinel documented next to each definition in catch22.cpp.
double histogram_mode(std::span<const double> z, int n_bins);
double f1ecac(std::span<const double> z);
double first_min_ac(std::span<const double> z);
double histogram_ami_even_2_5(std::span<const double> z);
double trev_1_num(std::span<const double> z);
double hrv_classic_pnn40(std::span<const double> z);
double binary_stats_mean_longstretch1(std::span<const double> z);
double transition_matrix_3ac_sumdiagcov(std::span<const double> z);
double periodicity_wang_th0_01(std::span<const double> z);
double embed2_dist_tau_d_expfit_meandiff(std::span<const double> z);
double auto_mutual_info_stats_40_gaussian_fmmi(std::span<const double> z);
double local_simple_mean1_tauresrat(std::span<const double> z);
double outlier_include_001_mdrmd(std::span<const double> z, int sign);
double welch_rect_area_5_1(std::span<const double> z);
double binary_stats_diff_longstretch0(std::span<const double> z);
double motif_three_quantile_hh(std::span<const double> z);
double fluct_anal_2_50_1_logi_prop_r1(std::span<const double> z, bool dfa);
double welch_rect_centroid(std::span<const double> z);
double local_simple_mean3_stderr(std::span<const double> z);

/// Biased autocorrelation, lags 0..n-1.
std::vector<double> autocorrelation(std::span<const double> z);
/// First lag whose autocorrelation is <= 0 (n when none).
int first_zero(std::span<const double> z);
/// Least-squares cubic spline with breaks {0, floor(n/2)-1, n-1}, evaluated at 0..n-1.
std::vector<double> spline_fit(std::span<const double> y);

}  // namespace catch22

}  // namespace epiwarn
