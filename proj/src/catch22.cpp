// catch22 statistics. Definitions follow the reference C implementation of the
// feature set; the z-scoring happens once in compute_sf22 before any of these
// run. Where a statistic has no defined value on an input (too short, zero
// denominators) the function returns the sentinel noted in its comment.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "epiwarn/features.hpp"

namespace epiwarn::catch22 {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double finite_or(double v, double sentinel) { return std::isfinite(v) ? v : sentinel; }

double mean(std::span<const double> x) {
    if (x.empty()) return kNaN;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) return kNaN;
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double cov(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) c += (x[i] - mx) * (y[i] - my);
    return c / static_cast<double>(x.size() - 1);
}

double corr(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        dx += (x[i] - mx) * (x[i] - mx);
        dy += (y[i] - my) * (y[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

// Ordinary least squares y = m x + b; zero slope and intercept when x is degenerate.
void linreg(std::span<const double> x, std::span<const double> y, double& m, double& b) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sx2 = 0, sxy = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sx2 += x[i] * x[i];
        sxy += x[i] * y[i];
        sy += y[i];
    }
    const double denom = n * sx2 - sx * sx;
    if (denom == 0.0) {
        m = 0.0;
        b = 0.0;
        return;
    }
    m = (n * sxy - sx * sy) / denom;
    b = (sy * sx2 - sx * sxy) / denom;
}

double euclidean_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Linearly interpolated quantile with the half-sample offset convention.
double quantile(std::span<const double> y, double q) {
    std::vector<double> s(y.begin(), y.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    const double edge = 0.5 / n;
    if (q < edge) return s.front();
    if (q > 1.0 - edge) return s.back();
    const double idx = n * q - 0.5;
    const auto left = static_cast<std::size_t>(std::floor(idx));
    const auto right = static_cast<std::size_t>(std::ceil(idx));
    if (left == right) return s[left];
    return s[left] + (idx - static_cast<double>(left)) * (s[right] - s[left]) / static_cast<double>(right - left);
}

// Symbols 1..groups by equiprobable quantile bins.
std::vector<int> coarse_grain_quantile(std::span<const double> y, int groups) {
    std::vector<double> th(static_cast<std::size_t>(groups + 1));
    for (int i = 0; i <= groups; ++i) th[i] = quantile(y, static_cast<double>(i) / groups);
    th[0] -= 1.0;
    std::vector<int> labels(y.size(), 0);
    for (int i = 0; i < groups; ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] > th[i] && y[j] <= th[i + 1]) labels[j] = i + 1;
    return labels;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_in_place(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

struct Spectrum {
    std::vector<double> w;   // angular frequency
    std::vector<double> sw;  // power per angular frequency
};

// Single-segment Welch estimate with a rectangular window, zero padded to the
// next power of two, one-sided.
Spectrum welch_rect(std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t nfft = next_pow2(n);
    const double m = mean(y);
    std::vector<std::complex<double>> f(nfft, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) f[i] = {y[i] - m, 0.0};
    fft_in_place(f);
    const std::size_t nout = nfft / 2 + 1;
    const double df = 1.0 / static_cast<double>(nfft);
    const double scale = static_cast<double>(n);  // segments * ||window||^2
    Spectrum s;
    s.w.resize(nout);
    s.sw.resize(nout);
    for (std::size_t i = 0; i < nout; ++i) {
        double p = std::norm(f[i]) / scale;
        if (i > 0 && i < nout - 1) p *= 2.0;
        s.w[i] = 2.0 * std::numbers::pi * static_cast<double>(i) * df;
        s.sw[i] = p / (2.0 * std::numbers::pi);
    }
    return s;
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> z) {
    const std::size_t n = z.size();
    const double m = mean(z);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = z[i] - m;
    std::vector<double> ac(n, 0.0);
    for (std::size_t lag = 0; lag < n; ++lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) s += d[t] * d[t + lag];
        ac[lag] = s;
    }
    const double c0 = ac[0];
    for (double& v : ac) v /= c0;
    return ac;
}

int first_zero(std::span<const double> z) {
    const auto ac = autocorrelation(z);
    const int n = static_cast<int>(z.size());
    int i = 0;
    while (i < n && ac[i] > 0.0) ++i;
    return i;
}

std::vector<double> spline_fit(std::span<const double> y) {
    // Cubic spline space with one interior break: {1, x, x^2, x^3, (x - b)_+^3}.
    // x is rescaled to [0, 1] for conditioning; the fitted values are the
    // least-squares projection and do not depend on the basis.
    const int n = static_cast<int>(y.size());
    const double last = std::max(1, n - 1);
    const double brk = (std::floor(n / 2.0) - 1.0) / last;
    Eigen::MatrixXd basis(n, 5);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        const double x = i / last;
        const double tail = std::max(0.0, x - brk);
        basis(i, 0) = 1.0;
        basis(i, 1) = x;
        basis(i, 2) = x * x;
        basis(i, 3) = x * x * x;
        basis(i, 4) = tail * tail * tail;
        rhs(i) = y[i];
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd fitted = basis * coef;
    return std::vector<double>(fitted.data(), fitted.data() + n);
}

// Centre of the fullest equal-width bin over [min, max]; leftmost bin on ties.
double histogram_mode(std::span<const double> z, int n_bins) {
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double lo = *lo_it, hi = *hi_it;
    const double step = (hi - lo) / n_bins;
    std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
    for (double v : z) {
        int idx = static_cast<int>((v - lo) / step);
        idx = std::clamp(idx, 0, n_bins - 1);
        ++counts[idx];
    }
    int best = 0;
    for (int i = 1; i < n_bins; ++i)
        if (counts[i] > counts[best]) best = i;
    const double left = lo + best * step;
    const double right = lo + (best + 1) * step;
    return (left + right) / 2.0;
}

// Lag (linearly interpolated) at which the ACF first drops below 1/e. Sentinel n.
double f1ecac(std::span<const double> z) {
    const auto ac = autocorrelation(z);
    const double thresh = 1.0 / std::exp(1.0);
    const int n = static_cast<int>(z.size());
    for (int i = 0; i < n - 2; ++i) {
        if (ac[i + 1] < thresh) {
            const double slope = ac[i + 1] - ac[i];
            const double dy = thresh - ac[i];
            return static_cast<double>(i) + dy / slope;
        }
    }
    return static_cast<double>(n);
}

// First strict local minimum of the ACF. Sentinel n.
double first_min_ac(std::span<const double> z) {
    const auto ac = autocorrelation(z);
    const int n = static_cast<int>(z.size());
    for (int i = 1; i < n - 1; ++i)
        if (ac[i] < ac[i - 1] && ac[i] < ac[i + 1]) return i;
    return n;
}

// Mutual information between x_t and x_{t+2} on a 5x5 even histogram spanning
// [min - 0.1, max + 0.1]. Sentinel 0.
double histogram_ami_even_2_5(std::span<const double> z) {
    constexpr int tau = 2;
    constexpr int bins = 5;
    const int n = static_cast<int>(z.size());
    if (n <= tau) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double step = (*hi_it - *lo_it + 0.2) / bins;
    std::array<double, bins + 1> edges{};
    for (int i = 0; i <= bins; ++i) edges[i] = *lo_it + step * i - 0.1;
    auto assign = [&](double v) {
        for (int j = 0; j <= bins; ++j)
            if (v < edges[j]) return j;  // 1..bins for in-range values
        return 0;
    };
    std::array<std::array<double, bins>, bins> joint{};
    int total = 0;
    for (int i = 0; i < n - tau; ++i) {
        const int a = assign(z[i]);
        const int b = assign(z[i + tau]);
        if (a < 1 || b < 1) continue;
        joint[a - 1][b - 1] += 1.0;
        ++total;
    }
    if (total == 0) return 0.0;
    std::array<double, bins> pa{}, pb{};
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            joint[i][j] /= total;
            pa[i] += joint[i][j];
            pb[j] += joint[i][j];
        }
    double ami = 0.0;
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j)
            if (joint[i][j] > 0.0) ami += joint[i][j] * std::log(joint[i][j] / (pa[i] * pb[j]));
    return ami;
}

double trev_1_num(std::span<const double> z) {
    const std::size_t n = z.size();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = z[i + 1] - z[i];
        s += d * d * d;
    }
    return s / static_cast<double>(n - 1);
}

double hrv_classic_pnn40(std::span<const double> z) {
    const std::size_t n = z.size();
    int count = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(z[i + 1] - z[i]) * 1000.0 > 40.0) ++count;
    return static_cast<double>(count) / static_cast<double>(n - 1);
}

// Longest run of consecutive values strictly above the mean.
double binary_stats_mean_longstretch1(std::span<const double> z) {
    const double m = mean(z);
    int best = 0, run = 0;
    for (double v : z) {
        run = (v - m > 0.0) ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

// Longest run of consecutive strictly negative increments.
double binary_stats_diff_longstretch0(std::span<const double> z) {
    int best = 0, run = 0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        run = (z[i + 1] - z[i] < 0.0) ? run + 1 : 0;
        best = std::max(best, run);
    }
    return best;
}

// Sum of the column variances of the 3-symbol transition matrix of the series
// downsampled at the first ACF zero crossing. Sentinel 0.
double transition_matrix_3ac_sumdiagcov(std::span<const double> z) {
    constexpr int groups = 3;
    const int n = static_cast<int>(z.size());
    const int tau = std::max(1, first_zero(z));
    const int n_down = (n - 1) / tau + 1;
    if (n_down < 2) return 0.0;
    std::vector<double> down(static_cast<std::size_t>(n_down));
    for (int i = 0; i < n_down; ++i) down[i] = z[static_cast<std::size_t>(i) * tau];
    const auto symbols = coarse_grain_quantile(down, groups);
    double t[groups][groups] = {};
    for (int j = 0; j < n_down - 1; ++j) {
        if (symbols[j] < 1 || symbols[j + 1] < 1) continue;
        t[symbols[j] - 1][symbols[j + 1] - 1] += 1.0;
    }
    for (auto& row : t)
        for (double& v : row) v /= (n_down - 1);
    double total = 0.0;
    for (int c = 0; c < groups; ++c) {
        const std::array<double, groups> col = {t[0][c], t[1][c], t[2][c]};
        total += cov(col, col);
    }
    return finite_or(total, 0.0);
}

// Wang et al. periodicity: first ACF peak (of the spline-detrended series)
// preceded by a trough at least 0.01 lower and itself positive. Returns the
// peak's position in the lag-1-based ACF array; sentinel 0.
double periodicity_wang_th0_01(std::span<const double> z) {
    constexpr double th = 0.01;
    const int n = static_cast<int>(z.size());
    const auto spline = spline_fit(z);
    std::vector<double> sub(z.size());
    for (int i = 0; i < n; ++i) sub[i] = z[i] - spline[i];
    const int acmax = static_cast<int>(std::ceil(n / 3.0));
    std::vector<double> acf(static_cast<std::size_t>(acmax));
    const std::span<const double> s(sub);
    for (int tau = 1; tau <= acmax; ++tau) {
        if (n - tau < 2) {
            acf[tau - 1] = kNaN;
            continue;
        }
        acf[tau - 1] = cov(s.first(n - tau), s.subspan(tau));
    }
    std::vector<int> troughs, peaks;
    for (int i = 1; i < acmax - 1; ++i) {
        const double in = acf[i] - acf[i - 1];
        const double out = acf[i + 1] - acf[i];
        if (in < 0 && out > 0)
            troughs.push_back(i);
        else if (in > 0 && out < 0)
            peaks.push_back(i);
    }
    for (int peak : peaks) {
        int j = -1;
        while (j + 1 < static_cast<int>(troughs.size()) && troughs[j + 1] < peak) ++j;
        if (j == -1) continue;
        if (acf[peak] - acf[troughs[j]] < th) continue;
        if (acf[peak] < 0) continue;
        return peak;
    }
    return 0.0;
}

// Mean absolute deviation between the histogram of successive distances in a
// 2-d delay embedding and an exponential fit. Sentinel 0.
double embed2_dist_tau_d_expfit_meandiff(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    int tau = first_zero(z);
    if (tau > n / 10.0) tau = static_cast<int>(std::floor(n / 10.0));
    const int nd = n - tau - 1;
    if (nd < 2) return 0.0;
    std::vector<double> d(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) {
        const double a = z[i + 1] - z[i];
        const double b = z[i + tau] - z[i + tau + 1];
        d[i] = std::sqrt(a * a + b * b);
    }
    const double l = mean(d);
    const double sd = stddev(d);
    if (!(sd >= 0.001)) return 0.0;
    const auto [lo_it, hi_it] = std::minmax_element(d.begin(), d.end());
    const int bins = static_cast<int>(std::ceil((*hi_it - *lo_it) / (3.5 * sd / std::pow(nd, 1.0 / 3.0))));
    if (bins <= 0) return 0.0;
    const double step = (*hi_it - *lo_it) / bins;
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : d) {
        int idx = static_cast<int>((v - *lo_it) / step);
        idx = std::clamp(idx, 0, bins - 1);
        ++counts[idx];
    }
    double total = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double left = i * step + *lo_it;
        const double right = (i + 1) * step + *lo_it;
        const double expf = std::max(0.0, std::exp(-(left + right) * 0.5 / l) / l);
        total += std::abs(static_cast<double>(counts[i]) / nd - expf);
    }
    return finite_or(total / bins, 0.0);
}

// First minimum of the Gaussian automutual information over lags 1..40 (capped
// at ceil(n/2)). Sentinel: the lag cap.
double auto_mutual_info_stats_40_gaussian_fmmi(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    int tau = 40;
    if (tau > std::ceil(n / 2.0)) tau = static_cast<int>(std::ceil(n / 2.0));
    std::vector<double> ami(static_cast<std::size_t>(tau));
    for (int i = 0; i < tau; ++i) {
        const int lag = i + 1;
        if (n - lag < 2) {
            ami[i] = kNaN;
            continue;
        }
        const double ac = corr(z.first(n - lag), z.subspan(lag));
        ami[i] = -0.5 * std::log(1.0 - ac * ac);
    }
    for (int i = 1; i < tau - 1; ++i)
        if (ami[i] < ami[i - 1] && ami[i] < ami[i + 1]) return i;
    return tau;
}

// Ratio of first ACF zero crossings of the one-step-mean forecast residuals
// and of the series. Sentinel 0.
double local_simple_mean1_tauresrat(std::span<const double> z) {
    const std::size_t n = z.size();
    if (n < 3) return 0.0;
    std::vector<double> res(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) res[i] = z[i + 1] - z[i];
    const bool constant = std::all_of(res.begin(), res.end(), [&](double v) { return v == res.front(); });
    if (constant) return 0.0;
    const double r = first_zero(res);
    const double y = first_zero(z);
    return finite_or(r / y, 0.0);
}

// Median position drift of exceedances over a rising threshold ladder. Sentinel 0.
double outlier_include_001_mdrmd(std::span<const double> z, int sign) {
    constexpr double inc = 0.01;
    const int n = static_cast<int>(z.size());
    std::vector<double> work(z.size());
    int tot = 0;
    bool constant = true;
    for (int i = 0; i < n; ++i) {
        if (z[i] != z[0]) constant = false;
        work[i] = sign * z[i];
        if (work[i] >= 0) ++tot;
    }
    if (constant) return 0.0;
    const double max_val = *std::max_element(work.begin(), work.end());
    if (max_val < inc) return 0.0;
    const int n_thresh = static_cast<int>(max_val / inc + 1);

    std::vector<double> ms_dti1(static_cast<std::size_t>(n_thresh));
    std::vector<double> ms_dti3(static_cast<std::size_t>(n_thresh));
    std::vector<double> ms_dti4(static_cast<std::size_t>(n_thresh));
    std::vector<double> r;
    r.reserve(z.size());
    for (int j = 0; j < n_thresh; ++j) {
        r.clear();
        for (int i = 0; i < n; ++i)
            if (work[i] >= j * inc) r.push_back(i + 1);
        const int high = static_cast<int>(r.size());
        double dt_sum = 0.0;
        for (int i = 0; i + 1 < high; ++i) dt_sum += r[i + 1] - r[i];
        ms_dti1[j] = high > 1 ? dt_sum / (high - 1) : kNaN;
        ms_dti3[j] = (high - 1) * 100.0 / tot;
        ms_dti4[j] = median(r) / (n / 2.0) - 1.0;
    }
    constexpr int trim = 2;
    int mj = 0;
    int fbi = n_thresh - 1;
    for (int i = 0; i < n_thresh; ++i) {
        if (ms_dti3[i] > trim) mj = i;
        if (std::isnan(ms_dti1[n_thresh - 1 - i])) fbi = n_thresh - 1 - i;
    }
    const int limit = std::min(mj, fbi);
    std::vector<double> head(ms_dti4.begin(), ms_dti4.begin() + limit + 1);
    return finite_or(median(std::move(head)), 0.0);
}

// Power in the lowest fifth of frequencies. Sentinel 0.
double welch_rect_area_5_1(std::span<const double> z) {
    const Spectrum s = welch_rect(z);
    const std::size_t nw = s.w.size();
    if (nw < 2) return 0.0;
    const double dw = s.w[1] - s.w[0];
    double area = 0.0;
    for (std::size_t i = 0; i < nw / 5; ++i) area += s.sw[i];
    return finite_or(area * dw, 0.0);
}

// Frequency at which the cumulative power first exceeds half the total. Sentinel 0.
double welch_rect_centroid(std::span<const double> z) {
    const Spectrum s = welch_rect(z);
    double total = 0.0;
    for (double v : s.sw) total += v;
    const double half = total * 0.5;
    double cum = 0.0;
    for (std::size_t i = 0; i < s.sw.size(); ++i) {
        cum += s.sw[i];
        if (cum > half) return s.w[i];
    }
    return 0.0;
}

// Entropy of successive symbol pairs under a 3-letter quantile alphabet.
double motif_three_quantile_hh(std::span<const double> z) {
    const std::size_t n = z.size();
    if (n < 2) return 0.0;
    const auto symbols = coarse_grain_quantile(z, 3);
    double counts[3][3] = {};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (symbols[j] < 1 || symbols[j + 1] < 1) continue;
        counts[symbols[j] - 1][symbols[j + 1] - 1] += 1.0;
    }
    double hh = 0.0;
    for (auto& row : counts)
        for (double c : row) {
            const double p = c / static_cast<double>(n - 1);
            if (p > 0.0) hh -= p * std::log(p);
        }
    return hh;
}

// Two-regime log-log fit of a fluctuation function over 50 log-spaced scales;
// returns the breakpoint position as a fraction of the scale count. Sentinel 0.
double fluct_anal_2_50_1_logi_prop_r1(std::span<const double> z, bool dfa) {
    const int n = static_cast<int>(z.size());
    constexpr int steps = 50;
    const double lin_low = std::log(5.0);
    const double lin_high = std::log(static_cast<double>(n / 2));
    const double step = (lin_high - lin_low) / (steps - 1);
    std::vector<int> tau;
    for (int i = 0; i < steps; ++i) {
        const int t = static_cast<int>(std::lround(std::exp(lin_low + i * step)));
        if (tau.empty() || tau.back() != t) tau.push_back(t);
    }
    const int ntau = static_cast<int>(tau.size());
    if (ntau < 12) return 0.0;

    std::vector<double> cs(z.size());
    cs[0] = z[0];
    for (int i = 1; i < n; ++i) cs[i] = cs[i - 1] + z[i];

    std::vector<double> x_reg(static_cast<std::size_t>(*std::max_element(tau.begin(), tau.end())));
    std::iota(x_reg.begin(), x_reg.end(), 1.0);

    std::vector<double> fluct(static_cast<std::size_t>(ntau));
    std::vector<double> buffer;
    for (int i = 0; i < ntau; ++i) {
        const int t = tau[i];
        if (t < 1) return 0.0;
        const int n_buf = n / t;
        if (n_buf < 1) return 0.0;
        buffer.assign(static_cast<std::size_t>(t), 0.0);
        double f = 0.0;
        for (int j = 0; j < n_buf; ++j) {
            const std::span<const double> seg(cs.data() + static_cast<std::size_t>(j) * t, static_cast<std::size_t>(t));
            double m = 0.0, b = 0.0;
            linreg(std::span<const double>(x_reg).first(t), seg, m, b);
            for (int k = 0; k < t; ++k) buffer[k] = seg[k] - (m * (k + 1) + b);
            if (dfa) {
                for (double v : buffer) f += v * v;
            } else {
                const auto [lo, hi] = std::minmax_element(buffer.begin(), buffer.end());
                f += (*hi - *lo) * (*hi - *lo);
            }
        }
        fluct[i] = dfa ? std::sqrt(f / (n_buf * t)) : std::sqrt(f / n_buf);
    }

    std::vector<double> log_t(static_cast<std::size_t>(ntau)), log_f(static_cast<std::size_t>(ntau));
    for (int i = 0; i < ntau; ++i) {
        log_t[i] = std::log(static_cast<double>(tau[i]));
        log_f[i] = std::log(fluct[i]);
    }
    constexpr int min_points = 6;
    const int nsserr = ntau - 2 * min_points + 1;
    std::vector<double> sserr(static_cast<std::size_t>(nsserr));
    std::vector<double> resid(static_cast<std::size_t>(ntau));
    const std::span<const double> lt(log_t), lf(log_f);
    for (int i = min_points; i < ntau - min_points + 1; ++i) {
        double m1, b1, m2, b2;
        linreg(lt.first(i), lf.first(i), m1, b1);
        linreg(lt.subspan(i - 1, ntau - i + 1), lf.subspan(i - 1, ntau - i + 1), m2, b2);
        for (int j = 0; j < i; ++j) resid[j] = log_t[j] * m1 + b1 - log_f[j];
        double e = euclidean_norm(std::span<const double>(resid).first(i));
        for (int j = 0; j < ntau - i + 1; ++j) resid[j] = log_t[j + i - 1] * m2 + b2 - log_f[j + i - 1];
        e += euclidean_norm(std::span<const double>(resid).first(ntau - i + 1));
        sserr[i - min_points] = e;
    }
    const double minimum = *std::min_element(sserr.begin(), sserr.end());
    double first_min = 0.0;
    for (int i = 0; i < nsserr; ++i)
        if (sserr[i] == minimum) {
            first_min = i + min_points - 1;
            break;
        }
    return finite_or((first_min + 1) / ntau, 0.0);
}

// Standard deviation of residuals from a rolling 3-sample mean forecast. Sentinel 0.
double local_simple_mean3_stderr(std::span<const double> z) {
    constexpr std::size_t train = 3;
    if (z.size() < train + 2) return 0.0;
    std::vector<double> res(z.size() - train);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = z[i + train] - (z[i] + z[i + 1] + z[i + 2]) / 3.0;
    return finite_or(stddev(res), 0.0);
}

}  // namespace epiwarn::catch22
