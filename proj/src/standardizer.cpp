#include <cmath>

#include "epiwarn/errors.hpp"
#include "epiwarn/learners.hpp"

namespace epiwarn {

StandardizationStats fit_standardizer(const Rows& train, bool scale) {
    if (train.size() < 2) throw InsufficientDataError("standardization needs at least 2 rows");
    const std::size_t d = train.front().size();
    StandardizationStats stats;
    stats.input_dim = d;
    stats.scale = scale;
    const double n = static_cast<double>(train.size());
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0;
        for (const auto& row : train) {
            if (row.size() != d) throw DimensionMismatchError("ragged training matrix");
            m += row[j];
        }
        m /= n;
        double ss = 0.0;
        bool constant = true;
        for (const auto& row : train) {
            ss += (row[j] - m) * (row[j] - m);
            if (row[j] != train.front()[j]) constant = false;
        }
        const double sd = std::sqrt(ss / (n - 1.0));
        if (constant || !(sd > 0.0) || !std::isfinite(sd)) {
            stats.dropped.push_back(j);
            continue;
        }
        stats.kept.push_back(j);
        stats.mean.push_back(m);
        stats.sd.push_back(sd);
    }
    return stats;
}

Rows apply_standardizer(const StandardizationStats& stats, const Rows& rows) {
    Rows out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != stats.input_dim)
            throw DimensionMismatchError("expected " + std::to_string(stats.input_dim) + " features, got " +
                                         std::to_string(row.size()));
        std::vector<double> r(stats.kept.size());
        for (std::size_t k = 0; k < stats.kept.size(); ++k) {
            const double v = row[stats.kept[k]];
            r[k] = stats.scale ? (v - stats.mean[k]) / stats.sd[k] : v;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace epiwarn
