#pragma once

// Oracles and fixtures shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "epiwarn/dataset.hpp"
#include "epiwarn/rng.hpp"
#include "epiwarn/sde.hpp"

namespace testing_support {

using epiwarn::Label;

/// Deterministic (S, I) ODE by classical RK4 with step h, recording I at t = 1..horizon.
inline std::vector<double> ode_oracle(const epiwarn::SirParams& p, int horizon, double h) {
    double s = p.s0, i = p.i0;
    const long per = std::lround(1.0 / h);
    long step = 0;
    auto f = [&](double t, double ss, double ii, double& ds, double& di) {
        const double inf = p.beta_at(t) * ss * ii;
        ds = p.lambda - inf - p.mu * ss;
        di = inf - (p.alpha + p.mu) * ii;
    };
    std::vector<double> out;
    for (int u = 1; u <= horizon; ++u) {
        for (long k = 0; k < per; ++k, ++step) {
            const double t = static_cast<double>(step) * h;
            double a1, b1, a2, b2, a3, b3, a4, b4;
            f(t, s, i, a1, b1);
            f(t + h / 2, s + h / 2 * a1, i + h / 2 * b1, a2, b2);
            f(t + h / 2, s + h / 2 * a2, i + h / 2 * b2, a3, b3);
            f(t + h, s + h * a3, i + h * b3, a4, b4);
            s += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
            i += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
        out.push_back(i);
    }
    return out;
}

/// max_t |x - ref| / max_t |ref|
inline double sup_relative_error(std::span<const double> x, std::span<const double> ref) {
    double err = 0.0, peak = 0.0;
    for (std::size_t t = 0; t < ref.size(); ++t) {
        err = std::max(err, std::abs(x[t] - ref[t]));
        peak = std::max(peak, std::abs(ref[t]));
    }
    return err / peak;
}

/// O(n^2) pair count: P(score_T > score_N) + 0.5 P(tie).
inline double pair_count_auc(std::span<const double> s, std::span<const Label> y) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != Label::T) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != Label::N) continue;
            pairs += 1.0;
            wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return wins / pairs;
}

/// Two-sided paired permutation test for AUC_a - AUC_b: each sample's pair of
/// scores is swapped between the two classifiers with probability 1/2.
inline double paired_permutation_p(std::span<const double> a, std::span<const double> b,
                                   std::span<const Label> y, int draws, std::uint64_t seed) {
    const double observed = std::abs(pair_count_auc(a, y) - pair_count_auc(b, y));
    epiwarn::CounterRng rng(seed, 0);
    std::vector<double> pa(a.begin(), a.end()), pb(b.begin(), b.end());
    int extreme = 0;
    for (int d = 0; d < draws; ++d) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const bool swap = rng.uniform() < 0.5;
            pa[i] = swap ? b[i] : a[i];
            pb[i] = swap ? a[i] : b[i];
        }
        if (std::abs(pair_count_auc(pa, y) - pair_count_auc(pb, y)) >= observed - 1e-12) ++extreme;
    }
    return static_cast<double>(extreme) / draws;
}

/// Per-test scratch directory under EPIWARN_TEST_TMP (or the system temp dir), emptied first.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const char* base = std::getenv("EPIWARN_TEST_TMP");
    std::filesystem::path root = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "epiwarn_tests";
    const auto dir = root / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline epiwarn::LabeledWindow make_window(std::vector<double> v, Label label, std::string id) {
    epiwarn::LabeledWindow w;
    w.values = std::move(v);
    w.label = label;
    w.source_id = std::move(id);
    w.end_index = static_cast<int>(w.values.size());
    return w;
}

}  // namespace testing_support
