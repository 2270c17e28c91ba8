#include "catch22_reference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <fftw3.h>

namespace ref {

namespace {

using ld = long double;

ld mean_ld(std::span<const double> x) {
    ld s = 0;
    for (double v : x) s += v;
    return s / static_cast<ld>(x.size());
}

ld sd_ld(std::span<const double> x) {
    const ld m = mean_ld(x);
    ld ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<ld>(x.size() - 1));
}

int first_zero_fftw(std::span<const double> z) {
    const auto ac = acf_fftw(z);
    for (std::size_t i = 0; i < ac.size(); ++i)
        if (!(ac[i] > 0.0)) return static_cast<int>(i);
    return static_cast<int>(z.size());
}

double quantile(std::vector<double> s, double q) {
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    if (q < 0.5 / n) return s.front();
    if (q > 1.0 - 0.5 / n) return s.back();
    const double pos = n * q - 0.5;
    const double lo = std::floor(pos), hi = std::ceil(pos);
    if (lo == hi) return s[static_cast<std::size_t>(lo)];
    return s[static_cast<std::size_t>(lo)] +
           (pos - lo) * (s[static_cast<std::size_t>(hi)] - s[static_cast<std::size_t>(lo)]) / (hi - lo);
}

// 1 + number of interior tertile thresholds strictly below the value.
std::vector<int> tertiles(std::span<const double> y) {
    const std::vector<double> v(y.begin(), y.end());
    const double t1 = quantile(v, 1.0 / 3.0), t2 = quantile(v, 2.0 / 3.0);
    std::vector<int> out;
    for (double x : y) out.push_back(1 + (x > t1 ? 1 : 0) + (x > t2 ? 1 : 0));
    return out;
}

std::size_t longest_run(const std::string& bits, char c) {
    std::size_t best = 0, pos = 0;
    while ((pos = bits.find(c, pos)) != std::string::npos) {
        std::size_t end = bits.find_first_not_of(c, pos);
        if (end == std::string::npos) end = bits.size();
        best = std::max(best, end - pos);
        pos = end;
    }
    return best;
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    const double upper = v[n / 2];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return 0.5 * (lower + upper);
}

// Sample autocovariance between the first n-lag and last n-lag points.
ld lagged_cov(std::span<const double> x, int lag) {
    const std::size_t m = x.size() - static_cast<std::size_t>(lag);
    const auto a = x.first(m), b = x.subspan(static_cast<std::size_t>(lag));
    const ld ma = mean_ld(a), mb = mean_ld(b);
    ld s = 0;
    for (std::size_t i = 0; i < m; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<ld>(m - 1);
}

// Cubic B-spline basis value via Cox-de Boor.
double bspline(const std::vector<double>& t, int i, int k, double x) {
    if (k == 0) {
        if (t[i] <= x && x < t[i + 1]) return 1.0;
        // close the last non-empty interval on the right
        if (x == t.back() && t[i] < x && t[i + 1] == x) return 1.0;
        return 0.0;
    }
    double a = 0.0, b = 0.0;
    if (t[i + k] > t[i]) a = (x - t[i]) / (t[i + k] - t[i]) * bspline(t, i, k - 1, x);
    if (t[i + k + 1] > t[i + 1]) b = (t[i + k + 1] - x) / (t[i + k + 1] - t[i + 1]) * bspline(t, i + 1, k - 1, x);
    return a + b;
}

struct Welch {
    std::vector<double> w, sw;
};

Welch naive_welch(std::span<const double> y) {
    const std::size_t n = y.size();
    std::size_t nfft = 1;
    while (nfft < n) nfft *= 2;
    const ld m = mean_ld(y);
    Welch out;
    const std::size_t nout = nfft / 2 + 1;
    const ld two_pi = 2.0L * std::numbers::pi_v<ld>;
    for (std::size_t k = 0; k < nout; ++k) {
        ld re = 0, im = 0;
        for (std::size_t t = 0; t < n; ++t) {
            const ld ang = two_pi * static_cast<ld>((k * t) % nfft) / static_cast<ld>(nfft);
            re += (y[t] - m) * std::cos(ang);
            im -= (y[t] - m) * std::sin(ang);
        }
        ld p = (re * re + im * im) / static_cast<ld>(n);
        if (k > 0 && k < nout - 1) p *= 2;
        out.w.push_back(static_cast<double>(two_pi * static_cast<ld>(k) / static_cast<ld>(nfft)));
        out.sw.push_back(static_cast<double>(p / two_pi));
    }
    return out;
}

// Least-squares line through (x, y) via Householder QR: returns {slope, intercept}.
std::pair<double, double> qr_line(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(x.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        a(static_cast<Eigen::Index>(i), 0) = x[i];
        a(static_cast<Eigen::Index>(i), 1) = 1.0;
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::Vector2d c = a.householderQr().solve(b);
    return {c(0), c(1)};
}

}  // namespace

std::vector<double> zscore(std::span<const double> x) {
    const ld m = mean_ld(x), s = sd_ld(x);
    std::vector<double> z;
    for (double v : x) z.push_back(static_cast<double>((v - m) / s));
    return z;
}

std::vector<double> acf_fftw(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    const int nfft = 2 * n;
    const ld m = mean_ld(z);
    std::vector<double> in(static_cast<std::size_t>(nfft), 0.0), back(static_cast<std::size_t>(nfft));
    for (int i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = static_cast<double>(z[static_cast<std::size_t>(i)] - m);
    std::vector<fftw_complex> spec(static_cast<std::size_t>(nfft / 2 + 1));
    fftw_plan fwd = fftw_plan_dft_r2c_1d(nfft, in.data(), spec.data(), FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (auto& c : spec) {
        c[0] = c[0] * c[0] + c[1] * c[1];
        c[1] = 0.0;
    }
    fftw_plan inv = fftw_plan_dft_c2r_1d(nfft, spec.data(), back.data(), FFTW_ESTIMATE);
    fftw_execute(inv);
    fftw_destroy_plan(inv);
    std::vector<double> ac(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ac[static_cast<std::size_t>(i)] = back[static_cast<std::size_t>(i)] / back[0];
    return ac;
}

double histogram_mode(std::span<const double> z, int bins) {
    const double lo = *std::min_element(z.begin(), z.end());
    const double hi = *std::max_element(z.begin(), z.end());
    const double step = (hi - lo) / bins;
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : z) {
        for (int b = 0; b < bins; ++b) {
            const double left = lo + b * step, right = lo + (b + 1) * step;
            if ((v >= left && v < right) || (b == bins - 1 && v >= left)) {
                ++counts[static_cast<std::size_t>(b)];
                break;
            }
        }
    }
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    return lo + (static_cast<double>(best) + 0.5) * step;
}

double f1ecac(std::span<const double> z) {
    const auto ac = acf_fftw(z);
    const double th = std::exp(-1.0);
    for (std::size_t i = 0; i + 2 < z.size(); ++i)
        if (ac[i + 1] < th) return static_cast<double>(i) + (th - ac[i]) / (ac[i + 1] - ac[i]);
    return static_cast<double>(z.size());
}

double first_min_ac(std::span<const double> z) {
    const auto ac = acf_fftw(z);
    for (std::size_t i = 1; i + 1 < ac.size(); ++i)
        if (ac[i] < ac[i - 1] && ac[i] < ac[i + 1]) return static_cast<double>(i);
    return static_cast<double>(z.size());
}

double ami_even_2_5(std::span<const double> z) {
    const double lo = *std::min_element(z.begin(), z.end());
    const double hi = *std::max_element(z.begin(), z.end());
    const double step = (hi - lo + 0.2) / 5;
    std::vector<double> edges;
    for (int i = 0; i <= 5; ++i) edges.push_back(lo + step * i - 0.1);
    auto bin = [&](double v) { return std::upper_bound(edges.begin(), edges.end(), v) - edges.begin(); };
    std::map<std::pair<long, long>, double> joint;
    std::map<long, double> pa, pb;
    double total = 0;
    for (std::size_t i = 0; i + 2 < z.size(); ++i) {
        joint[{bin(z[i]), bin(z[i + 2])}] += 1;
        total += 1;
    }
    for (auto& [k, v] : joint) {
        v /= total;
        pa[k.first] += v;
        pb[k.second] += v;
    }
    double mi = 0;
    for (const auto& [k, v] : joint) mi += v * std::log(v / (pa[k.first] * pb[k.second]));
    return mi;
}

double trev(std::span<const double> z) {
    ld s = 0;
    for (std::size_t i = 1; i < z.size(); ++i) s += std::pow(static_cast<ld>(z[i]) - z[i - 1], 3);
    return static_cast<double>(s / static_cast<ld>(z.size() - 1));
}

double pnn40(std::span<const double> z) {
    std::vector<double> d(z.size());
    std::adjacent_difference(z.begin(), z.end(), d.begin());
    const auto c = std::count_if(d.begin() + 1, d.end(), [](double v) { return std::abs(v) > 0.04; });
    return static_cast<double>(c) / static_cast<double>(z.size() - 1);
}

double mean_longstretch1(std::span<const double> z) {
    double m = 0;
    for (double v : z) m += v;
    m /= static_cast<double>(z.size());
    std::string bits;
    for (double v : z) bits += v - m > 0 ? '1' : '0';
    return static_cast<double>(longest_run(bits, '1'));
}

double transition_matrix(std::span<const double> z) {
    const int tau = std::max(1, first_zero_fftw(z));
    std::vector<double> down;
    for (std::size_t i = 0; i < z.size(); i += static_cast<std::size_t>(tau)) down.push_back(z[i]);
    if (down.size() < 2) return 0.0;
    const auto s = tertiles(down);
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    for (std::size_t j = 0; j + 1 < s.size(); ++j) t(s[j] - 1, s[j + 1] - 1) += 1.0;
    t /= static_cast<double>(down.size() - 1);
    const Eigen::RowVector3d colmean = t.colwise().mean();
    return (t.rowwise() - colmean).array().square().colwise().sum().sum() / 2.0;
}

double periodicity_wang(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    const double b = std::floor(n / 2.0) - 1.0, e = n - 1.0;
    const std::vector<double> knots = {0, 0, 0, 0, b, e, e, e, e};
    Eigen::MatrixXd basis(n, 5);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 5; ++j) basis(i, j) = bspline(knots, j, 3, i);
        y(i) = z[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd coef = basis.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
    const Eigen::VectorXd fit = basis * coef;
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] - fit(i);

    const int acmax = static_cast<int>(std::ceil(n / 3.0));
    std::vector<double> acf;
    for (int lag = 1; lag <= acmax; ++lag) acf.push_back(static_cast<double>(lagged_cov(r, lag)));
    int last_trough = -1;
    for (int i = 1; i + 1 < acmax; ++i) {
        const bool falling_in = acf[i] < acf[i - 1], rising_out = acf[i + 1] > acf[i];
        const bool rising_in = acf[i] > acf[i - 1], falling_out = acf[i + 1] < acf[i];
        if (falling_in && rising_out) {
            last_trough = i;
        } else if (rising_in && falling_out && last_trough >= 0) {
            if (acf[i] - acf[last_trough] >= 0.01 && acf[i] >= 0) return i;
        }
    }
    return 0.0;
}

double embed2_expfit(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    int tau = first_zero_fftw(z);
    if (tau > n / 10.0) tau = n / 10;
    std::vector<double> d;
    for (int i = 0; i + tau + 1 < n; ++i)
        d.push_back(std::hypot(z[i + 1] - z[i], z[i + tau] - z[i + tau + 1]));
    const double l = static_cast<double>(mean_ld(d)), s = static_cast<double>(sd_ld(d));
    const double lo = *std::min_element(d.begin(), d.end()), hi = *std::max_element(d.begin(), d.end());
    const int bins = static_cast<int>(std::ceil((hi - lo) / (3.5 * s / std::cbrt(static_cast<double>(d.size())))));
    const double step = (hi - lo) / bins;
    double total = 0;
    for (int b = 0; b < bins; ++b) {
        const double left = lo + b * step, right = lo + (b + 1) * step;
        const auto c = std::count_if(d.begin(), d.end(), [&](double v) {
            return (v >= left && v < right) || (b == bins - 1 && v >= left);
        });
        total += std::abs(static_cast<double>(c) / static_cast<double>(d.size()) - std::exp(-(left + right) / (2 * l)) / l);
    }
    return total / bins;
}

double ami_gaussian_fmmi(std::span<const double> z) {
    const int n = static_cast<int>(z.size());
    const int cap = std::min(40, static_cast<int>(std::ceil(n / 2.0)));
    std::vector<double> ami;
    for (int lag = 1; lag <= cap; ++lag) {
        const Eigen::Map<const Eigen::VectorXd> a(z.data(), n - lag), b(z.data() + lag, n - lag);
        const Eigen::VectorXd ca = a.array() - a.mean(), cb = b.array() - b.mean();
        const double r = ca.dot(cb) / (ca.norm() * cb.norm());
        ami.push_back(-0.5 * std::log1p(-r * r));
    }
    for (int i = 1; i + 1 < cap; ++i)
        if (ami[i] < ami[i - 1] && ami[i] < ami[i + 1]) return i;
    return cap;
}

double tauresrat(std::span<const double> z) {
    std::vector<double> res(z.size());
    std::adjacent_difference(z.begin(), z.end(), res.begin());
    res.erase(res.begin());
    return static_cast<double>(first_zero_fftw(res)) / first_zero_fftw(z);
}

double outlier_mdrmd(std::span<const double> z, int sign) {
    const int n = static_cast<int>(z.size());
    std::vector<double> w;
    for (double v : z) w.push_back(sign * v);
    const double tot = static_cast<double>(std::count_if(w.begin(), w.end(), [](double v) { return v >= 0; }));
    const double top = *std::max_element(w.begin(), w.end());
    if (top < 0.01) return 0.0;
    const int levels = static_cast<int>(top / 0.01 + 1);
    std::vector<bool> gap_undefined;
    std::vector<double> pct, drift;
    for (int j = 0; j < levels; ++j) {
        std::vector<double> idx;
        for (int i = 0; i < n; ++i)
            if (w[static_cast<std::size_t>(i)] >= j * 0.01) idx.push_back(i + 1);
        gap_undefined.push_back(idx.size() < 2);
        pct.push_back((static_cast<double>(idx.size()) - 1) * 100.0 / tot);
        drift.push_back(median(idx) / (n / 2.0) - 1.0);
    }
    int mj = 0;
    for (int j = 0; j < levels; ++j)
        if (pct[static_cast<std::size_t>(j)] > 2) mj = j;
    int fbi = levels - 1;
    for (int j = 0; j < levels; ++j)
        if (gap_undefined[static_cast<std::size_t>(j)]) {
            fbi = j;
            break;
        }
    const int limit = std::min(mj, fbi);
    return median(std::vector<double>(drift.begin(), drift.begin() + limit + 1));
}

double welch_area(std::span<const double> z) {
    const Welch s = naive_welch(z);
    const double dw = s.w[1] - s.w[0];
    ld a = 0;
    for (std::size_t i = 0; i < s.w.size() / 5; ++i) a += s.sw[i];
    return static_cast<double>(a * dw);
}

double welch_centroid(std::span<const double> z) {
    const Welch s = naive_welch(z);
    ld total = 0;
    for (double v : s.sw) total += v;
    ld cum = 0;
    for (std::size_t i = 0; i < s.sw.size(); ++i) {
        cum += s.sw[i];
        if (cum > total / 2) return s.w[i];
    }
    return 0.0;
}

double diff_longstretch0(std::span<const double> z) {
    std::string bits;
    for (std::size_t i = 1; i < z.size(); ++i) bits += z[i] - z[i - 1] < 0 ? '0' : '1';
    return static_cast<double>(longest_run(bits, '0'));
}

double motif_hh(std::span<const double> z) {
    const auto s = tertiles(z);
    std::map<std::pair<int, int>, double> c;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) c[{s[j], s[j + 1]}] += 1;
    double h = 0;
    for (const auto& [k, v] : c) {
        const double p = v / static_cast<double>(z.size() - 1);
        h -= p * std::log(p);
    }
    return h;
}

double fluct(std::span<const double> z, bool dfa) {
    const int n = static_cast<int>(z.size());
    const double a = std::log(5.0), b = std::log(static_cast<double>(n / 2));
    std::vector<int> taus;
    for (int i = 0; i < 50; ++i) {
        const int t = static_cast<int>(std::lround(std::exp(a + i * (b - a) / 49)));
        if (std::find(taus.begin(), taus.end(), t) == taus.end()) taus.push_back(t);
    }
    const int nt = static_cast<int>(taus.size());
    if (nt < 12) return 0.0;
    std::vector<double> cs(z.size());
    std::partial_sum(z.begin(), z.end(), cs.begin());
    std::vector<double> lt, lf;
    for (int t : taus) {
        const int segs = n / t;
        ld f = 0;
        for (int s = 0; s < segs; ++s) {
            std::vector<double> x, y;
            for (int k = 0; k < t; ++k) {
                x.push_back(k + 1);
                y.push_back(cs[static_cast<std::size_t>(s * t + k)]);
            }
            const auto [m, c] = qr_line(x, y);
            std::vector<double> r;
            for (int k = 0; k < t; ++k) r.push_back(y[static_cast<std::size_t>(k)] - (m * (k + 1) + c));
            if (dfa) {
                for (double v : r) f += static_cast<ld>(v) * v;
            } else {
                const double range = *std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end());
                f += static_cast<ld>(range) * range;
            }
        }
        lt.push_back(std::log(static_cast<double>(t)));
        lf.push_back(std::log(static_cast<double>(dfa ? std::sqrt(f / (segs * t)) : std::sqrt(f / segs))));
    }
    std::vector<double> err;
    for (int i = 6; i <= nt - 6; ++i) {
        const std::vector<double> x1(lt.begin(), lt.begin() + i), y1(lf.begin(), lf.begin() + i);
        const std::vector<double> x2(lt.begin() + i - 1, lt.end()), y2(lf.begin() + i - 1, lf.end());
        const auto [m1, c1] = qr_line(x1, y1);
        const auto [m2, c2] = qr_line(x2, y2);
        ld e1 = 0, e2 = 0;
        for (std::size_t j = 0; j < x1.size(); ++j) e1 += std::pow(static_cast<ld>(x1[j] * m1 + c1 - y1[j]), 2);
        for (std::size_t j = 0; j < x2.size(); ++j) e2 += std::pow(static_cast<ld>(x2[j] * m2 + c2 - y2[j]), 2);
        err.push_back(static_cast<double>(std::sqrt(e1) + std::sqrt(e2)));
    }
    const auto first = std::min_element(err.begin(), err.end()) - err.begin();
    return (static_cast<double>(first) + 6.0) / nt;
}

double mean3_stderr(std::span<const double> z) {
    std::vector<double> r;
    for (std::size_t i = 3; i < z.size(); ++i)
        r.push_back(static_cast<double>(z[i] - (static_cast<ld>(z[i - 3]) + z[i - 2] + z[i - 1]) / 3));
    return static_cast<double>(sd_ld(r));
}

std::vector<double> sf22(std::span<const double> raw) {
    const std::vector<double> zv = zscore(raw);
    const std::span<const double> z(zv);
    return {histogram_mode(z, 5), histogram_mode(z, 10), f1ecac(z),          first_min_ac(z),
            ami_even_2_5(z),      trev(z),               pnn40(z),           mean_longstretch1(z),
            transition_matrix(z), periodicity_wang(z),   embed2_expfit(z),   ami_gaussian_fmmi(z),
            tauresrat(z),         outlier_mdrmd(z, 1),   outlier_mdrmd(z, -1), welch_area(z),
            diff_longstretch0(z), motif_hh(z),           fluct(z, false),    fluct(z, true),
            welch_centroid(z),    mean3_stderr(z)};
}

}  // namespace ref
