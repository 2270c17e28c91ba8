#include "epiwarn/incidence.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/gamma.hpp>

#include "epiwarn/errors.hpp"
#include "epiwarn/io.hpp"

namespace epiwarn {

namespace {

int parse_fixed_int(std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ValidationError("bad date field");
    return v;
}

std::optional<double> parse_count(std::string_view s, std::size_t line) {
    if (s.empty() || s == "NA" || s == "na" || s == "NaN") return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError("bad count '" + std::string(s) + "'", line);
    if (v < 0.0) throw ParseError("negative count", line);
    return v;
}

struct RawTable {
    std::vector<Date> dates;
    std::vector<std::vector<std::optional<double>>> columns;
};

RawTable parse_dated_table(std::string_view text, const std::vector<std::string>& expected) {
    RawTable t;
    t.columns.resize(expected.size() - 1);
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool header_seen = false;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (fields != expected) {
                std::string want;
                for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
                throw ParseError("expected header " + want, line_no);
            }
            continue;
        }
        if (fields.size() != expected.size()) throw ParseError("wrong field count", line_no);
        Date d;
        try {
            d = parse_date(fields[0]);
        } catch (const ValidationError&) {
            throw ParseError("bad date '" + fields[0] + "'", line_no);
        }
        if (!t.dates.empty()) {
            if (d == t.dates.back()) throw ParseError("duplicate date " + fields[0], line_no);
            if (d < t.dates.back()) throw ParseError("dates not increasing at " + fields[0], line_no);
        }
        t.dates.push_back(d);
        for (std::size_t c = 1; c < fields.size(); ++c) t.columns[c - 1].push_back(parse_count(fields[c], line_no));
        if (end == text.size()) break;
    }
    if (!header_seen) throw ParseError("empty file", 1);
    return t;
}

IncidenceSeries make_series(const std::vector<Date>& dates, const std::vector<std::optional<double>>& counts) {
    IncidenceSeries s;
    bool weekly = dates.size() >= 2;
    for (std::size_t i = 1; i < dates.size(); ++i)
        if ((dates[i] - dates[i - 1]).count() != 7) weekly = false;
    if (weekly) {
        s.dates = dates;
        s.counts = counts;
        s.cadence = Cadence::Weekly;
        return s;
    }
    s.cadence = Cadence::Daily;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i > 0)
            for (Date d = dates[i - 1] + std::chrono::days{1}; d < dates[i]; d += std::chrono::days{1}) {
                s.dates.push_back(d);
                s.counts.push_back(std::nullopt);
            }
        s.dates.push_back(dates[i]);
        s.counts.push_back(counts[i]);
    }
    return s;
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw ValidationError("date must be YYYY-MM-DD");
    const std::chrono::year_month_day ymd{std::chrono::year{parse_fixed_int(text.substr(0, 4))},
                                          std::chrono::month{static_cast<unsigned>(parse_fixed_int(text.substr(5, 2)))},
                                          std::chrono::day{static_cast<unsigned>(parse_fixed_int(text.substr(8, 2)))}};
    if (!ymd.ok()) throw ValidationError("invalid calendar date");
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<double> IncidenceSeries::values() const {
    std::vector<double> out;
    out.reserve(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!counts[i]) throw ValidationError("missing count on " + format_date(dates[i]) + "; impute first");
        out.push_back(*counts[i]);
    }
    return out;
}

IncidenceSeries parse_incidence_csv(std::string_view text) {
    const RawTable t = parse_dated_table(text, {"date", "count"});
    return make_series(t.dates, t.columns[0]);
}

IncidenceSeries load_incidence(const std::filesystem::path& path) { return parse_incidence_csv(read_text(path)); }

PrevalenceTable parse_prevalence_csv(std::string_view text) {
    const RawTable t = parse_dated_table(text, {"date", "cumulative", "deaths", "recovered"});
    return {make_series(t.dates, t.columns[0]), make_series(t.dates, t.columns[1]), make_series(t.dates, t.columns[2])};
}

PrevalenceTable load_prevalence(const std::filesystem::path& path) { return parse_prevalence_csv(read_text(path)); }

IncidenceSeries weekly_to_daily(const IncidenceSeries& series) {
    if (series.cadence != Cadence::Weekly) throw ValidationError("weekly_to_daily needs a weekly series");
    IncidenceSeries out;
    out.cadence = Cadence::Daily;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& c = series.counts[i];
        double used = 0.0;
        for (int d = 0; d < 7; ++d) {
            out.dates.push_back(series.dates[i] + std::chrono::days{d});
            if (!c) {
                out.counts.push_back(std::nullopt);
                continue;
            }
            // last day takes the remainder so the week sums back to its count
            const double v = d < 6 ? *c / 7.0 : *c - used;
            used += v;
            out.counts.push_back(v);
        }
    }
    return out;
}

IncidenceSeries impute_linear(const IncidenceSeries& series) {
    if (series.size() == 0) throw ValidationError("empty series");
    if (!series.counts.front() || !series.counts.back())
        throw ValidationError("cannot impute: first or last value missing");
    IncidenceSeries out = series;
    std::size_t prev = 0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!out.counts[i]) continue;
        if (i > prev + 1) {
            const double a = *out.counts[prev], b = *out.counts[i];
            const double span = static_cast<double>(i - prev);
            for (std::size_t j = prev + 1; j < i; ++j)
                out.counts[j] = a + (b - a) * static_cast<double>(j - prev) / span;
        }
        prev = i;
    }
    return out;
}

IncidenceSeries prevalence_from_cumulative(const IncidenceSeries& cumulative, const IncidenceSeries& deaths,
                                           const IncidenceSeries& recovered) {
    if (cumulative.dates != deaths.dates || cumulative.dates != recovered.dates)
        throw DimensionMismatchError("cumulative, deaths and recovered are not aligned");
    IncidenceSeries out;
    out.dates = cumulative.dates;
    out.cadence = cumulative.cadence;
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        const auto &c = cumulative.counts[i], &d = deaths.counts[i], &r = recovered.counts[i];
        if (!c || !d || !r) {
            out.counts.push_back(std::nullopt);
            continue;
        }
        const double p = *c - *d - *r;
        if (p < 0.0)
            throw DataConsistencyError("negative prevalence on " + format_date(cumulative.dates[i]) +
                                       " (cumulative < deaths + recovered)");
        out.counts.push_back(p);
    }
    return out;
}

IncidenceSeries prevalence_from_cumulative(const PrevalenceTable& table) {
    return prevalence_from_cumulative(table.cumulative, table.deaths, table.recovered);
}

std::vector<double> discretize_serial_interval(const SerialInterval& si, int cap) {
    if (!(si.mean > 1.0) || !(si.sd > 0.0)) throw ValidationError("serial interval needs mean > 1 and sd > 0");
    if (cap < 1) throw ValidationError("serial interval cap must be >= 1");
    const double a = std::pow((si.mean - 1.0) / si.sd, 2.0);
    const double b = si.sd * si.sd / (si.mean - 1.0);
    const boost::math::gamma_distribution<double> g0(a, b), g1(a + 1.0, b);
    auto F = [](const auto& g, double k) { return k <= 0.0 ? 0.0 : boost::math::cdf(g, k); };
    std::vector<double> w(static_cast<std::size_t>(cap) + 1, 0.0);
    double total = 0.0;
    for (int k = 1; k <= cap; ++k) {
        const double kd = k;
        double v = kd * F(g0, kd) + (kd - 2.0) * F(g0, kd - 2.0) - 2.0 * (kd - 1.0) * F(g0, kd - 1.0) +
                   a * b * (2.0 * F(g1, kd - 1.0) - F(g1, kd - 2.0) - F(g1, kd));
        v = std::max(v, 0.0);
        w[static_cast<std::size_t>(k)] = v;
        total += v;
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> infection_pressure(const std::vector<double>& incidence, const std::vector<double>& weights) {
    std::vector<double> lam(incidence.size(), 0.0);
    for (std::size_t t = 0; t < incidence.size(); ++t) {
        double s = 0.0;
        for (std::size_t k = 1; k < weights.size() && k <= t; ++k) s += incidence[t - k] * weights[k];
        lam[t] = s;
    }
    return lam;
}

ReSeries estimate_re(const std::vector<double>& incidence, const SerialInterval& si, const ReConfig& config) {
    if (config.window < 1) throw ValidationError("window must be >= 1");
    if (!(config.prior_shape > 0.0) || !(config.prior_scale > 0.0)) throw ValidationError("prior must be positive");
    if (incidence.size() < static_cast<std::size_t>(config.window) + 2)
        throw InsufficientDataError("series shorter than window + 2 days");
    for (double v : incidence)
        if (!(v >= 0.0)) throw ValidationError("incidence must be non-negative and present");
    const auto w = discretize_serial_interval(si);
    const auto lam = infection_pressure(incidence, w);
    const std::size_t win = static_cast<std::size_t>(config.window);
    const double tail = (1.0 - config.level) / 2.0;

    ReSeries re;
    re.values.assign(incidence.size(), std::nullopt);
    bool any = false;
    for (std::size_t t = win; t < incidence.size(); ++t) {
        // windows start on day 1: day 0 never has any pressure behind it
        double si_sum = 0.0, sl_sum = 0.0;
        for (std::size_t u = t + 1 - win; u <= t; ++u) {
            si_sum += incidence[u];
            sl_sum += lam[u];
        }
        if (!(sl_sum > 0.0)) continue;
        const double shape = config.prior_shape + si_sum;
        const double scale = 1.0 / (1.0 / config.prior_scale + sl_sum);
        const boost::math::gamma_distribution<double> post(shape, scale);
        re.values[t] = ReEstimate{shape * scale, boost::math::quantile(post, tail),
                                  boost::math::quantile(post, 1.0 - tail)};
        any = true;
    }
    if (!any) throw DegenerateInputError("zero infection pressure throughout the series");
    return re;
}

ReSeries estimate_re(const IncidenceSeries& series, const SerialInterval& si, const ReConfig& config) {
    if (series.cadence != Cadence::Daily) throw ValidationError("Re estimation needs a daily series");
    ReSeries re = estimate_re(series.values(), si, config);
    re.dates = series.dates;
    return re;
}

std::string re_series_csv(const ReSeries& re) {
    std::string out = "date,re_mean,re_lo,re_hi\n";
    for (std::size_t i = 0; i < re.values.size(); ++i) {
        out += i < re.dates.size() ? format_date(re.dates[i]) : std::to_string(i + 1);
        if (re.values[i])
            out += "," + format_double(re.values[i]->mean) + "," + format_double(re.values[i]->lo) + "," +
                   format_double(re.values[i]->hi);
        else
            out += ",,,";
        out += '\n';
    }
    return out;
}

std::vector<std::optional<double>> re_means(const ReSeries& re) {
    std::vector<std::optional<double>> out;
    out.reserve(re.values.size());
    for (const auto& v : re.values) out.push_back(v ? std::optional<double>(v->mean) : std::nullopt);
    return out;
}

WindowSet label_empirical_T(const std::vector<double>& incidence, const std::vector<std::optional<double>>& re_mean,
                            int min_len) {
    if (re_mean.size() != incidence.size()) throw DimensionMismatchError("Re series not aligned with incidence");
    WindowSet out;
    const std::size_t n = incidence.size();
    std::size_t i = 0;
    while (i < n) {
        if (!re_mean[i] || *re_mean[i] >= 1.0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && re_mean[j + 1] && *re_mean[j + 1] < 1.0) ++j;
        const bool left = i > 0 && re_mean[i - 1] && *re_mean[i - 1] >= 1.0;
        const bool right = j + 1 < n && re_mean[j + 1] && *re_mean[j + 1] >= 1.0;
        const int len = static_cast<int>(j - i + 1);
        if (left && right && len >= min_len) {
            LabeledWindow w;
            w.values.assign(incidence.begin() + static_cast<std::ptrdiff_t>(i),
                            incidence.begin() + static_cast<std::ptrdiff_t>(j + 1));
            w.label = Label::T;
            w.end_index = static_cast<int>(j + 1);
            w.source_id = "emp-T-" + std::to_string(i + 1);
            out.push_back(std::move(w));
        }
        i = j + 1;
    }
    return out;
}

WindowSet label_empirical_T(const std::vector<double>& incidence, const ReSeries& re, int min_len) {
    return label_empirical_T(incidence, re_means(re), min_len);
}

std::optional<std::size_t> below_one_suffix_start(const std::vector<std::optional<double>>& re_mean) {
    std::optional<std::size_t> first_defined;
    std::optional<std::size_t> last_above;
    for (std::size_t i = 0; i < re_mean.size(); ++i) {
        if (!re_mean[i]) continue;
        if (!first_defined) first_defined = i;
        if (*re_mean[i] >= 1.0) last_above = i;
    }
    if (!first_defined) return std::nullopt;
    const std::size_t start = last_above ? *last_above + 1 : *first_defined;
    if (start >= re_mean.size()) return std::nullopt;
    return start;
}

WindowSet label_empirical_N(const std::vector<double>& incidence, const std::vector<std::optional<double>>& re_mean,
                            int n_windows, int min_len, std::uint64_t seed) {
    if (re_mean.size() != incidence.size()) throw DimensionMismatchError("Re series not aligned with incidence");
    if (n_windows < 1) throw ValidationError("n_windows must be >= 1");
    if (min_len < 1) throw ValidationError("min_len must be >= 1");
    const auto start = below_one_suffix_start(re_mean);
    if (!start) throw InsufficientDataError("no trailing stretch with Re < 1");
    const int suffix = static_cast<int>(incidence.size() - *start);
    if (suffix < min_len)
        throw InsufficientDataError("trailing stretch of " + std::to_string(suffix) + " days is shorter than " +
                                    std::to_string(min_len));
    WindowSet out;
    out.reserve(static_cast<std::size_t>(n_windows));
    for (int i = 0; i < n_windows; ++i) {
        CounterRng rng(seed, static_cast<std::uint64_t>(i));
        const int len = static_cast<int>(rng.uniform_int(min_len, suffix));
        const int offset = static_cast<int>(rng.uniform_int(0, suffix - len));
        const std::size_t b = *start + static_cast<std::size_t>(offset);
        LabeledWindow w;
        w.values.assign(incidence.begin() + static_cast<std::ptrdiff_t>(b),
                        incidence.begin() + static_cast<std::ptrdiff_t>(b + static_cast<std::size_t>(len)));
        w.label = Label::N;
        w.end_index = static_cast<int>(b) + len;
        w.source_id = "emp-N-" + std::to_string(i);
        out.push_back(std::move(w));
    }
    return out;
}

WindowSet label_empirical_N(const std::vector<double>& incidence, const ReSeries& re, int n_windows, int min_len,
                            std::uint64_t seed) {
    return label_empirical_N(incidence, re_means(re), n_windows, min_len, seed);
}

LabeledWindow truncate_tail(const LabeledWindow& window, int days) {
    if (days < 0) throw ValidationError("days must be >= 0");
    if (window.length() <= days) throw SliceError("window too short to drop " + std::to_string(days) + " days");
    LabeledWindow out = window;
    out.values.resize(static_cast<std::size_t>(window.length() - days));
    out.end_index -= days;
    out.gap += days;
    return out;
}

LabeledWindow scale_counts(const LabeledWindow& window, double factor) {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be > 0");
    LabeledWindow out = window;
    for (double& v : out.values) v *= factor;
    return out;
}

}  // namespace epiwarn
