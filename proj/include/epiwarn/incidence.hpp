#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epiwarn/dataset.hpp"

namespace epiwarn {

using Date = std::chrono::sys_days;

Date parse_date(std::string_view text);
std::string format_date(Date d);

enum class Cadence { Daily, Weekly };

struct IncidenceSeries {
    std::vector<Date> dates;
    std::vector<std::optional<double>> counts;  // nullopt = missing
    Cadence cadence = Cadence::Daily;

    std::size_t size() const { return dates.size(); }
    /// Counts with every value present; throws if any is missing.
    std::vector<double> values() const;
};

/// date,count. Empty or NA fields are missing. Weekly cadence is inferred when
/// every step is exactly seven days; a daily file with skipped dates gets
/// missing entries for the skipped days.
IncidenceSeries parse_incidence_csv(std::string_view text);
IncidenceSeries load_incidence(const std::filesystem::path& path);

/// date,cumulative,deaths,recovered.
struct PrevalenceTable {
    IncidenceSeries cumulative;
    IncidenceSeries deaths;
    IncidenceSeries recovered;
};
PrevalenceTable parse_prevalence_csv(std::string_view text);
PrevalenceTable load_prevalence(const std::filesystem::path& path);

/// Each weekly count (dated by the first day of its week) spread evenly over seven days.
IncidenceSeries weekly_to_daily(const IncidenceSeries& series);
IncidenceSeries impute_linear(const IncidenceSeries& series);
IncidenceSeries prevalence_from_cumulative(const IncidenceSeries& cumulative, const IncidenceSeries& deaths,
                                           const IncidenceSeries& recovered);
IncidenceSeries prevalence_from_cumulative(const PrevalenceTable& table);

struct SerialInterval {
    double mean = 6.3;
    double sd = 4.2;
};

inline constexpr int kSerialIntervalCap = 60;

/// Daily infectiousness weights w[s] for s = 0..cap (w[0] = 0), from the
/// shifted-gamma discretisation, renormalised to sum to 1.
std::vector<double> discretize_serial_interval(const SerialInterval& si, int cap = kSerialIntervalCap);

struct ReConfig {
    int window = 7;
    double prior_shape = 1.0;
    double prior_scale = 5.0;
    double level = 0.95;
};

struct ReEstimate {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct ReSeries {
    std::vector<Date> dates;
    std::vector<std::optional<ReEstimate>> values;  // nullopt where undefined

    std::size_t size() const { return dates.size(); }
};

/// Infection pressure sum_{s>=1} I[t-s] w[s] for every t.
std::vector<double> infection_pressure(const std::vector<double>& incidence, const std::vector<double>& weights);

ReSeries estimate_re(const IncidenceSeries& series, const SerialInterval& si, const ReConfig& config = {});
ReSeries estimate_re(const std::vector<double>& incidence, const SerialInterval& si, const ReConfig& config = {});

std::string re_series_csv(const ReSeries& re);

/// Maximal runs [k0, k] with mean Re < 1, bracketed by Re >= 1 on both sides,
/// of length >= min_len, as T windows of the incidence values.
WindowSet label_empirical_T(const std::vector<double>& incidence, const ReSeries& re, int min_len = 14);
WindowSet label_empirical_T(const std::vector<double>& incidence, const std::vector<std::optional<double>>& re_mean,
                            int min_len = 14);

/// Random sub-windows (length >= min_len) of the trailing stretch after which
/// Re stays below 1, labelled N. Window i uses stream (seed, i).
WindowSet label_empirical_N(const std::vector<double>& incidence, const std::vector<std::optional<double>>& re_mean,
                            int n_windows, int min_len, std::uint64_t seed);
WindowSet label_empirical_N(const std::vector<double>& incidence, const ReSeries& re, int n_windows = 1200,
                            int min_len = 8, std::uint64_t seed = 0);

/// Index of the first day of the trailing below-one stretch; nullopt if the
/// last defined estimate is >= 1.
std::optional<std::size_t> below_one_suffix_start(const std::vector<std::optional<double>>& re_mean);

LabeledWindow truncate_tail(const LabeledWindow& window, int days = 7);
LabeledWindow scale_counts(const LabeledWindow& window, double factor = 5.0);

std::vector<std::optional<double>> re_means(const ReSeries& re);

}  // namespace epiwarn
