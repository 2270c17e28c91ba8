#include "epiwarn/features.hpp"

#include <cmath>
#include <numeric>

#include "epiwarn/errors.hpp"
#include "epiwarn/parallel.hpp"

namespace epiwarn {

std::string_view to_string(FeatureSet set) { return set == FeatureSet::SF22 ? "SF22" : "EWSI5"; }

FeatureSet parse_feature_set(std::string_view text) {
    if (text == "SF22" || text == "sf22" || text == "22" || text == "22SF") return FeatureSet::SF22;
    if (text == "EWSI5" || text == "ewsi5" || text == "5" || text == "5EWSI") return FeatureSet::EWSI5;
    throw ValidationError("unknown feature set '" + std::string(text) + "'");
}

std::string_view feature_code(FeatureSet set) { return set == FeatureSet::SF22 ? "22" : "5"; }

const std::vector<std::string>& feature_names(FeatureSet set) {
    static const std::vector<std::string> sf22 = {
        "DN_HistogramMode_5",
        "DN_HistogramMode_10",
        "CO_f1ecac",
        "CO_FirstMin_ac",
        "CO_HistogramAMI_even_2_5",
        "CO_trev_1_num",
        "MD_hrv_classic_pnn40",
        "SB_BinaryStats_mean_longstretch1",
        "SB_TransitionMatrix_3ac_sumdiagcov",
        "PD_PeriodicityWang_th0_01",
        "CO_Embed2_Dist_tau_d_expfit_meandiff",
        "IN_AutoMutualInfoStats_40_gaussian_fmmi",
        "FC_LocalSimple_mean1_tauresrat",
        "DN_OutlierInclude_p_001_mdrmd",
        "DN_OutlierInclude_n_001_mdrmd",
        "SP_Summaries_welch_rect_area_5_1",
        "SB_BinaryStats_diff_longstretch0",
        "SB_MotifThree_quantile_hh",
        "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
        "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
        "SP_Summaries_welch_rect_centroid",
        "FC_LocalSimple_mean3_stderr",
    };
    static const std::vector<std::string> ewsi5 = {"SD", "CV", "AR1", "Skewness", "Kurtosis"};
    return set == FeatureSet::SF22 ? sf22 : ewsi5;
}

namespace {

void require_finite(std::span<const double> series) {
    for (double v : series)
        if (!std::isfinite(v)) throw DegenerateInputError("series contains non-finite values");
}

bool is_constant(std::span<const double> series) {
    for (double v : series)
        if (v != series.front()) return false;
    return true;
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

namespace {

/// x * 2^-e with e chosen so the largest magnitude lies in [0.5, 1). Exact, and
/// keeps squares and fourth powers of very small series out of underflow.
std::vector<double> pow2_rescale(std::span<const double> x, int& e) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    e = 0;
    if (peak > 0.0) std::frexp(peak, &e);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::ldexp(x[i], -e);
    return out;
}

}  // namespace

std::vector<double> z_normalize(std::span<const double> raw) {
    if (raw.size() < 2) throw DegenerateInputError("z-normalization needs at least 2 points");
    require_finite(raw);
    if (is_constant(raw)) throw DegenerateInputError("constant series");
    int e = 0;
    const std::vector<double> scaled = pow2_rescale(raw, e);
    const std::span<const double> series(scaled);
    const double m = mean_of(series);
    double ss = 0.0;
    for (double v : series) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(series.size() - 1));
    if (!(sd > 0.0)) throw DegenerateInputError("zero standard deviation");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - m) / sd;
    return out;
}

FeatureVector compute_ewsi5(std::span<const double> raw) {
    const std::size_t n = raw.size();
    if (n < 3) throw DegenerateInputError("EWS indicators need at least 3 points");
    require_finite(raw);
    if (is_constant(raw)) throw DegenerateInputError("constant series");
    // moments are taken on the series rescaled by 2^-e; only SD carries the scale back
    int e = 0;
    const std::vector<double> scaled = pow2_rescale(raw, e);
    const std::span<const double> series(scaled);

    const double m = mean_of(series);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    const double sd = std::sqrt(m2 / (nd - 1.0));
    if (m == 0.0) throw DegenerateInputError("coefficient of variation undefined for zero mean");
    const double cv = sd / m * 100.0;
    const double sd_raw = std::ldexp(sd, e);

    // Lag-1 product moment over the n-1 pairs (x_i, x_{i-1}), each side
    // standardized by its own mean and spread: the lag-1 Pearson correlation.
    const auto lead = series.subspan(1);
    const auto lag = series.first(n - 1);
    const double ml = mean_of(lead);
    const double mg = mean_of(lag);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = lead[i] - ml;
        const double b = lag[i] - mg;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInputError("lag-1 autocorrelation undefined");
    const double ar1 = sxy / std::sqrt(sxx * syy);

    const double skew = m3 / (nd * sd * sd * sd);
    const double pop_var = m2 / nd;
    const double kurt = (m4 / nd) / (pop_var * pop_var);
    return {{sd_raw, cv, ar1, skew, kurt}, FeatureSet::EWSI5};
}

FeatureVector compute_sf22(std::span<const double> series) {
    const std::vector<double> zv = z_normalize(series);
    const std::span<const double> z(zv);
    using namespace catch22;
    std::vector<double> v = {
        histogram_mode(z, 5),
        histogram_mode(z, 10),
        f1ecac(z),
        first_min_ac(z),
        histogram_ami_even_2_5(z),
        trev_1_num(z),
        hrv_classic_pnn40(z),
        binary_stats_mean_longstretch1(z),
        transition_matrix_3ac_sumdiagcov(z),
        periodicity_wang_th0_01(z),
        embed2_dist_tau_d_expfit_meandiff(z),
        auto_mutual_info_stats_40_gaussian_fmmi(z),
        local_simple_mean1_tauresrat(z),
        outlier_include_001_mdrmd(z, 1),
        outlier_include_001_mdrmd(z, -1),
        welch_rect_area_5_1(z),
        binary_stats_diff_longstretch0(z),
        motif_three_quantile_hh(z),
        fluct_anal_2_50_1_logi_prop_r1(z, false),
        fluct_anal_2_50_1_logi_prop_r1(z, true),
        welch_rect_centroid(z),
        local_simple_mean3_stderr(z),
    };
    return {std::move(v), FeatureSet::SF22};
}

FeatureVector compute_features(std::span<const double> series, FeatureSet set) {
    return set == FeatureSet::SF22 ? compute_sf22(series) : compute_ewsi5(series);
}

FeaturizeResult featurize(const WindowSet& windows, FeatureSet set, bool fail_fast) {
    std::vector<std::vector<double>> values(windows.size());
    std::vector<std::string> errors(windows.size());
    parallel_for(windows.size(), [&](std::size_t i) {
        try {
            values[i] = compute_features(windows[i].values, set).values;
            for (std::size_t j = 0; j < values[i].size(); ++j)
                if (!std::isfinite(values[i][j]))
                    throw DegenerateInputError("non-finite " + feature_names(set)[j]);
        } catch (const DegenerateInputError& e) {
            if (fail_fast) throw DegenerateInputError("window " + windows[i].source_id + ": " + e.what());
            errors[i] = e.what();
        }
    });

    FeaturizeResult result;
    result.matrix.set_id = set;
    result.matrix.names = feature_names(set);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!errors[i].empty()) {
            result.failures.push_back({windows[i].source_id, errors[i]});
            continue;
        }
        result.matrix.rows.push_back(std::move(values[i]));
        result.matrix.labels.push_back(windows[i].label);
        result.matrix.ids.push_back(windows[i].source_id);
    }
    return result;
}

}  // namespace epiwarn
