#include "epiwarn/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <openssl/evp.h>

#include "epiwarn/errors.hpp"
#include "epiwarn/io.hpp"
#include "epiwarn/metrics.hpp"
#include "epiwarn/parallel.hpp"

namespace epiwarn {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(SweepKind kind) { return kind == SweepKind::Rolling ? "rolling" : "expanding"; }

SweepKind parse_sweep_kind(std::string_view text) {
    if (text == "rolling") return SweepKind::Rolling;
    if (text == "expanding") return SweepKind::Expanding;
    throw ValidationError("sweep_kind must be rolling or expanding, got '" + std::string(text) + "'");
}

void RunConfig::validate() const {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ValidationError(msg);
    };
    need(seed.has_value(), "seed: a seed is required (no implicit entropy)");
    need(!out.empty(), "out: output directory is required");
    need(train_per_class > 0, "train_per_class must be positive");
    need(test_per_class > 0, "test_per_class must be positive");
    need(!noise_kinds.empty(), "noise: at least one noise kind is required");
    need(!feature_sets.empty(), "features: at least one feature set is required");
    need(!model_kinds.empty(), "models: at least one model is required");
    need(window_length >= 10 && window_length <= 1500, "window_length must be in [10, 1500]");
    need(mwu_per_class > 1, "mwu_per_class must be > 1");
    need(empirical_t_min_len > 0, "empirical_t_min_len must be positive");
    need(empirical_n_windows > 0, "empirical_n_windows must be positive");
    need(empirical_n_min_len > 0, "empirical_n_min_len must be positive");
    need(truncate_days >= 0, "truncate_days must be >= 0");
    need(scale_factor > 0.0, "scale_factor must be > 0");
    if (include_mixed && noise_kinds.size() > 1) {
        const int k = static_cast<int>(noise_kinds.size());
        need(train_per_class / k > 0 && test_per_class / k > 0,
             "train_per_class/test_per_class too small to split across mixed sources");
    }
}

void apply_desk_scale(RunConfig& config) {
    config.desk_scale = true;
    config.train_per_class = 600;
    config.test_per_class = 150;
    config.noise_kinds = {NoiseKind::White, NoiseKind::Environmental};
}

char dataset_code(std::optional<NoiseKind> kind) { return kind ? noise_code(*kind) : 'M'; }

std::string classifier_name(char dataset, FeatureSet set, ModelKind model) {
    return std::string(1, dataset) + std::string(feature_code(set)) + std::string(1, model_code(model));
}

std::string format_accuracy_cell(double accuracy, double halfwidth) {
    char buf[64];
    if (accuracy == 1.0 || accuracy == 0.0)
        std::snprintf(buf, sizeof(buf), "%d (\xC2\xB1%.4f)", static_cast<int>(accuracy), halfwidth);
    else
        std::snprintf(buf, sizeof(buf), "%.4f (\xC2\xB1%.4f)", accuracy, halfwidth);
    return buf;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

namespace {

/// Collects outputs under one root and writes the manifest last.
class Outputs {
public:
    Outputs(fs::path root, std::string command, json config)
        : root_(std::move(root)), command_(std::move(command)), config_(std::move(config)) {
        fs::create_directories(root_);
    }

    void write(const std::string& rel, std::string_view text) {
        write_text(root_ / rel, text);
        entries_.push_back({{"path", rel}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
        written_.push_back(root_ / rel);
    }

    void write_json(const std::string& rel, const json& doc) { write(rel, doc.dump(2) + "\n"); }

    std::vector<fs::path> finish() {
        const json manifest{{"schema", "epiwarn.manifest"},
                            {"version", kReportSchemaVersion},
                            {"command", command_},
                            {"config", config_},
                            {"outputs", entries_}};
        write_text(root_ / "manifest.json", manifest.dump(2) + "\n");
        written_.push_back(root_ / "manifest.json");
        return written_;
    }

private:
    fs::path root_;
    std::string command_;
    json config_;
    json entries_ = json::array();
    std::vector<fs::path> written_;
};

json config_json(const RunConfig& c) {
    json kinds = json::array(), sets = json::array(), models = json::array();
    for (auto k : c.noise_kinds) kinds.push_back(to_string(k));
    for (auto s : c.feature_sets) sets.push_back(to_string(s));
    for (auto m : c.model_kinds) models.push_back(to_string(m));
    // the output path is left out so that runs into different directories compare equal
    return json{{"seed", *c.seed},
                {"noise", kinds},
                {"include_mixed", c.include_mixed},
                {"train_per_class", c.train_per_class},
                {"test_per_class", c.test_per_class},
                {"features", sets},
                {"models", models},
                {"sweep_kind", to_string(c.sweep_kind)},
                {"desk_scale", c.desk_scale},
                {"window_length", c.window_length}};
}

TrainConfig train_config_for(const RunConfig& c, const std::string& classifier) {
    TrainConfig t;
    // per-classifier stream so adding or removing cells leaves the others untouched
    std::uint64_t h = *c.seed;
    for (char ch : classifier) h = CounterRng(h, static_cast<unsigned char>(ch)).next_u64();
    t.seed = h;
    return t;
}

std::string report_csv_header() {
    return "classifier,dataset,features,model,auc,auc_ci,accuracy,accuracy_ci,n_pos,n_neg,tp,fn,tn,fp\n";
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string report_csv_row(const EvalReport& r, FeatureSet set, ModelKind model) {
    return r.classifier + "," + r.dataset + "," + std::string(to_string(set)) + "," + std::string(to_string(model)) +
           "," + opt_double(r.auc) + "," + opt_double(r.auc_ci_halfwidth) + "," + format_double(r.accuracy) + "," +
           format_double(r.accuracy_ci_halfwidth) + "," + std::to_string(r.n_pos) + "," + std::to_string(r.n_neg) +
           "," + std::to_string(r.tp) + "," + std::to_string(r.fn) + "," + std::to_string(r.tn) + "," +
           std::to_string(r.fp) + "\n";
}

json report_json(const EvalReport& r) {
    return json{{"classifier", r.classifier},
                {"dataset", r.dataset},
                {"auc", r.auc ? json(*r.auc) : json(nullptr)},
                {"auc_ci", r.auc_ci_halfwidth ? json(*r.auc_ci_halfwidth) : json(nullptr)},
                {"accuracy", r.accuracy},
                {"accuracy_ci", r.accuracy_ci_halfwidth},
                {"n_pos", r.n_pos},
                {"n_neg", r.n_neg},
                {"tp", r.tp},
                {"fn", r.fn},
                {"tn", r.tn},
                {"fp", r.fp}};
}

std::string failures_csv(const std::vector<std::tuple<std::string, std::string, FeatureFailure>>& failures) {
    std::string out = "dataset,split,window_id,message\n";
    for (const auto& [ds, split, f] : failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), ',', ';');
        out += ds + "," + split + "," + f.window_id + "," + msg + "\n";
    }
    return out;
}

}  // namespace

std::uint64_t kind_seed(std::uint64_t seed, NoiseKind kind) {
    return CounterRng(seed, 0x100 + static_cast<std::uint64_t>(noise_code(kind))).next_u64();
}

std::vector<Trajectory> simulate_kind(const RunConfig& config, NoiseKind kind) {
    DatasetRequest req;
    req.noise_kind = kind;
    req.n_trans = config.train_per_class + config.test_per_class;
    req.n_null = req.n_trans;
    req.seed = kind_seed(*config.seed, kind);
    return generate_dataset(req);
}

std::vector<DatasetSplit> build_datasets(const RunConfig& config) {
    config.validate();
    std::vector<DatasetSplit> out;
    for (NoiseKind kind : config.noise_kinds) {
        const std::uint64_t s = kind_seed(*config.seed, kind);
        WindowSet windows;
        {
            const auto trajs = simulate_kind(config, kind);
            windows = slice_dataset(trajs, std::string(1, noise_code(kind)), s, config.window_length);
        }
        SplitSpec spec;
        spec.train_per_class = config.train_per_class;
        spec.test_per_class = config.test_per_class;
        spec.seed = s;
        auto [train, test] = partition(windows, spec);
        out.push_back({noise_code(kind), std::move(train), std::move(test)});
    }
    if (config.include_mixed && config.noise_kinds.size() > 1) {
        const int k = static_cast<int>(config.noise_kinds.size());
        std::vector<const WindowSet*> train_src, test_src;
        for (const auto& d : out) {
            train_src.push_back(&d.train);
            test_src.push_back(&d.test);
        }
        CounterRng rng(*config.seed, 0x4d49584544ULL);
        DatasetSplit mixed;
        mixed.code = 'M';
        mixed.train = build_mixed(train_src, config.train_per_class / k, rng);
        mixed.test = build_mixed(test_src, config.test_per_class / k, rng);
        out.push_back(std::move(mixed));
    }
    return out;
}

std::vector<fs::path> cmd_simulate(const RunConfig& config) {
    config.validate();
    Outputs outs(config.out, "simulate", config_json(config));
    for (NoiseKind kind : config.noise_kinds) {
        const std::string code(1, noise_code(kind));
        const std::uint64_t s = kind_seed(*config.seed, kind);
        const auto trajs = simulate_kind(config, kind);
        outs.write("trajectories_" + code + ".csv", trajectories_csv(trajs, code));
        outs.write_json("trajectories_" + code + ".json", trajectories_manifest(trajs, code, kind, s));
        const WindowSet windows = slice_dataset(trajs, code, s, config.window_length);
        outs.write("windows_" + code + ".csv", windows_csv(windows));
        outs.write_json("windows_" + code + ".json", windows_manifest(windows));
    }
    return outs.finish();
}

namespace {

struct FeaturizedSplit {
    FeatureMatrix train;
    FeatureMatrix test;
};

struct Cell {
    std::size_t dataset;
    FeatureSet set;
    ModelKind model;
    std::string name;
};

}  // namespace

std::vector<fs::path> cmd_experiment(const RunConfig& config) {
    config.validate();
    Outputs outs(config.out, "experiment", config_json(config));
    const auto datasets = build_datasets(config);

    std::vector<std::tuple<std::string, std::string, FeatureFailure>> failures;
    std::map<std::pair<std::size_t, FeatureSet>, FeaturizedSplit> feats;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (FeatureSet set : config.feature_sets) {
            const std::string tag = std::string(1, datasets[d].code) + std::string(feature_code(set));
            auto tr = featurize(datasets[d].train, set, false);
            auto te = featurize(datasets[d].test, set, false);
            for (auto& f : tr.failures) failures.emplace_back(tag, "train", f);
            for (auto& f : te.failures) failures.emplace_back(tag, "test", f);
            outs.write("features/" + tag + "_train.csv", features_csv(tr.matrix));
            outs.write("features/" + tag + "_test.csv", features_csv(te.matrix));
            feats[{d, set}] = {std::move(tr.matrix), std::move(te.matrix)};
        }
    }
    outs.write("failures.csv", failures_csv(failures));

    std::vector<Cell> cells;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (FeatureSet set : config.feature_sets)
            for (ModelKind m : config.model_kinds) cells.push_back({d, set, m, classifier_name(datasets[d].code, set, m)});

    std::vector<TrainedModel> models(cells.size());
    std::vector<std::vector<double>> scores(cells.size());
    std::vector<EvalReport> reports(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
        const auto& c = cells[i];
        const auto& fsplit = feats.at({c.dataset, c.set});
        models[i] = train_model(c.model, fsplit.train, train_config_for(config, c.name));
        scores[i] = predict_score(models[i], fsplit.test);
        reports[i] = evaluate(models[i], fsplit.test);
        reports[i].classifier = c.name;
        reports[i].dataset = std::string(1, datasets[c.dataset].code);
    });

    std::string csv = report_csv_header();
    json rows = json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const auto& test = feats.at({c.dataset, c.set}).test;
        outs.write_json("models/" + c.name + ".json", model_to_json(models[i]));
        std::string sc = "window_id,label,score,predicted\n";
        const double thr = decision_threshold(c.model);
        for (std::size_t r = 0; r < test.n_rows(); ++r)
            sc += test.ids[r] + "," + label_char(test.labels[r]) + "," + format_double(scores[i][r]) + "," +
                  (scores[i][r] >= thr ? "T" : "N") + "\n";
        outs.write("scores/" + c.name + ".csv", sc);
        csv += report_csv_row(reports[i], c.set, c.model);
        rows.push_back(report_json(reports[i]));
    }
    outs.write("reports.csv", csv);
    outs.write_json("reports.json", json{{"schema", "epiwarn.reports"}, {"version", kReportSchemaVersion}, {"rows", rows}});

    // Same test set (dataset and feature set fixed): paired. Same model across
    // training sets: unpaired, since every classifier is scored on its own test set.
    std::string dl = "classifier_a,classifier_b,comparison,auc_a,auc_b,statistic,p_value\n";
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); ++b) {
            const auto &ca = cells[a], &cb = cells[b];
            const bool same_test = ca.dataset == cb.dataset && ca.set == cb.set;
            if (!same_test && ca.model != cb.model) continue;
            const auto& ta = feats.at({ca.dataset, ca.set}).test;
            const auto& tb = feats.at({cb.dataset, cb.set}).test;
            DelongResult r;
            try {
                r = same_test ? delong_test(scores[a], scores[b], ta.labels)
                              : delong_test_unpaired(scores[a], ta.labels, scores[b], tb.labels);
            } catch (const Error&) {
                continue;  // single-class test set: no AUC to compare
            }
            dl += ca.name + "," + cb.name + "," + (same_test ? "paired" : "unpaired") + "," + format_double(r.auc_a) +
                  "," + format_double(r.auc_b) + "," + format_double(r.statistic) + "," + format_double(r.p_value) +
                  "\n";
        }
    }
    outs.write("delong.csv", dl);
    return outs.finish();
}

namespace {

struct SweepJob {
    std::size_t dataset;
    FeatureSet set;
    ModelKind model;
    std::size_t iteration;
};

SweepRow run_sweep_iteration(const DatasetSplit& data, FeatureSet set, ModelKind model, SweepKind kind, int x,
                             const TrainConfig& train_config) {
    auto sub = [&](const WindowSet& ws) {
        WindowSet out;
        out.reserve(ws.size());
        for (const auto& w : ws) {
            if (w.length() != 400) throw SliceError("sweeps need length-400 windows");
            out.push_back(kind == SweepKind::Rolling ? sub_window(w, kRollingLength, x)
                                                     : sub_window(w, x, kExpandingGap));
        }
        return out;
    };
    const auto tr = featurize(sub(data.train), set, false);
    const auto te = featurize(sub(data.test), set, false);
    const TrainedModel m = train_model(model, tr.matrix, train_config);
    SweepRow row;
    row.kind = kind;
    row.x = x;
    row.classifier = classifier_name(data.code, set, model);
    row.report = evaluate(m, te.matrix);
    row.report.classifier = row.classifier;
    row.report.dataset = std::string(1, data.code);
    row.n_train = tr.matrix.n_rows();
    row.n_dropped = tr.failures.size() + te.failures.size();
    return row;
}

std::vector<int> sweep_grid(SweepKind kind) { return kind == SweepKind::Rolling ? rolling_gaps() : expanding_lengths(); }

}  // namespace

std::vector<SweepRow> run_sweep_cell(const DatasetSplit& data, FeatureSet set, ModelKind model, SweepKind kind,
                                     const TrainConfig& train_config) {
    const auto grid = sweep_grid(kind);
    std::vector<SweepRow> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            rows[i] = run_sweep_iteration(data, set, model, kind, grid[i], train_config);
        } catch (const Error& e) {
            throw Error("sweep iteration " + std::to_string(i) + " (x=" + std::to_string(grid[i]) + "): " + e.what());
        }
    });
    return rows;
}

std::vector<fs::path> cmd_sweep(const RunConfig& config) {
    config.validate();
    if (config.window_length != 400) throw ValidationError("window_length must be 400 for sweeps");
    Outputs outs(config.out, "sweep", config_json(config));
    const auto datasets = build_datasets(config);
    const auto grid = sweep_grid(config.sweep_kind);

    std::vector<SweepJob> jobs;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (FeatureSet set : config.feature_sets)
            for (ModelKind m : config.model_kinds)
                for (std::size_t i = 0; i < grid.size(); ++i) jobs.push_back({d, set, m, i});

    std::vector<SweepRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const auto& job = jobs[j];
        const std::string name = classifier_name(datasets[job.dataset].code, job.set, job.model);
        try {
            rows[j] = run_sweep_iteration(datasets[job.dataset], job.set, job.model, config.sweep_kind,
                                          grid[job.iteration], train_config_for(config, name));
        } catch (const Error& e) {
            throw Error(name + " sweep iteration " + std::to_string(job.iteration) + ": " + e.what());
        }
    });

    const std::string xname = config.sweep_kind == SweepKind::Rolling ? "D" : "L";
    std::string csv = "sweep,iteration," + xname +
                      ",classifier,dataset,features,model,auc,auc_ci,accuracy,accuracy_ci,n_train,n_test,n_dropped\n";
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& r = rows[j];
        const auto& job = jobs[j];
        csv += std::string(to_string(config.sweep_kind)) + "," + std::to_string(job.iteration) + "," +
               std::to_string(r.x) + "," + r.classifier + "," + r.report.dataset + "," +
               std::string(to_string(job.set)) + "," + std::string(to_string(job.model)) + "," +
               opt_double(r.report.auc) + "," + opt_double(r.report.auc_ci_halfwidth) + "," +
               format_double(r.report.accuracy) + "," + format_double(r.report.accuracy_ci_halfwidth) + "," +
               std::to_string(r.n_train) + "," + std::to_string(r.report.n_pos + r.report.n_neg) + "," +
               std::to_string(r.n_dropped) + "\n";
    }
    outs.write("sweep_" + std::string(to_string(config.sweep_kind)) + ".csv", csv);
    return outs.finish();
}

EmpiricalWindows prepare_empirical(const EmpiricalSource& source, Label label, const RunConfig& config) {
    EmpiricalWindows out;
    std::vector<double> re_input;
    if (source.mode == EmpiricalMode::Incidence) {
        IncidenceSeries s = load_incidence(source.path);
        if (s.cadence == Cadence::Weekly) s = weekly_to_daily(s);
        out.series = impute_linear(s);
        re_input = out.series.values();
    } else {
        PrevalenceTable t = load_prevalence(source.path);
        t.cumulative = impute_linear(t.cumulative);
        t.deaths = impute_linear(t.deaths);
        t.recovered = impute_linear(t.recovered);
        out.series = prevalence_from_cumulative(t);
        // Re is driven by new cases: first differences of the cumulative count
        const auto cum = t.cumulative.values();
        re_input.resize(cum.size());
        for (std::size_t i = 0; i < cum.size(); ++i) re_input[i] = std::max(0.0, i == 0 ? cum[0] : cum[i] - cum[i - 1]);
    }
    out.re = estimate_re(re_input, source.si);
    out.re.dates = out.series.dates;
    const auto values = out.series.values();
    if (label == Label::T)
        out.windows = label_empirical_T(values, out.re, config.empirical_t_min_len);
    else
        out.windows = label_empirical_N(values, out.re, config.empirical_n_windows, config.empirical_n_min_len,
                                        CounterRng(*config.seed, 0x454d50).next_u64());
    if (out.windows.empty())
        throw InsufficientDataError(std::string("no ") + label_char(label) + " windows in " + source.path.string());
    return out;
}

std::vector<fs::path> cmd_classify_empirical(const RunConfig& config) {
    if (!config.seed) throw ValidationError("seed: a seed is required (no implicit entropy)");
    if (config.out.empty()) throw ValidationError("out: output directory is required");
    if (!config.empirical_t && !config.empirical_n)
        throw ValidationError("empirical: give at least one of the T or N data files");
    if (config.models_dir.empty() || !fs::is_directory(config.models_dir))
        throw ValidationError("models_dir: '" + config.models_dir.string() + "' is not a directory");

    std::vector<fs::path> model_files;
    for (const auto& e : fs::directory_iterator(config.models_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") model_files.push_back(e.path());
    std::sort(model_files.begin(), model_files.end());
    if (model_files.empty()) throw ValidationError("models_dir: no model files in " + config.models_dir.string());

    json cfg = config_json(config);
    Outputs outs(config.out, "classify-empirical", cfg);

    struct Variant {
        std::string name;
        Label label;
        WindowSet windows;
    };
    std::vector<Variant> variants;
    for (Label label : {Label::T, Label::N}) {
        const auto& src = label == Label::T ? config.empirical_t : config.empirical_n;
        if (!src) continue;
        const std::string tag(1, label_char(label));
        EmpiricalWindows ew = prepare_empirical(*src, label, config);
        outs.write("re_" + tag + ".csv", re_series_csv(ew.re));
        outs.write("windows_" + tag + ".csv", windows_csv(ew.windows));
        variants.push_back({"original", label, ew.windows});
        if (label == Label::T) {
            WindowSet tr;
            for (const auto& w : ew.windows)
                if (w.length() > config.truncate_days) tr.push_back(truncate_tail(w, config.truncate_days));
            if (!tr.empty()) variants.push_back({"truncated", label, std::move(tr)});
        }
        WindowSet sc;
        for (const auto& w : ew.windows) sc.push_back(scale_counts(w, config.scale_factor));
        variants.push_back({"scaled", label, std::move(sc)});
    }

    std::map<std::pair<std::size_t, FeatureSet>, FeaturizeResult> cache;
    auto features_for = [&](std::size_t v, FeatureSet set) -> const FeaturizeResult& {
        auto it = cache.find({v, set});
        if (it == cache.end()) it = cache.emplace(std::pair{v, set}, featurize(variants[v].windows, set, false)).first;
        return it->second;
    };

    std::string csv = "classifier,variant,label,n,correct,accuracy,accuracy_ci,display,n_dropped\n";
    for (const auto& path : model_files) {
        TrainedModel model;
        try {
            model = model_from_json(json::parse(read_text(path)));
        } catch (const json::exception& e) {
            throw ValidationError("model file " + path.string() + ": " + e.what());
        }
        const std::string name = path.stem().string();
        for (std::size_t v = 0; v < variants.size(); ++v) {
            const auto& fr = features_for(v, model.feature_set);
            if (fr.matrix.n_rows() == 0)
                throw InsufficientDataError("every " + variants[v].name + " window failed featurisation");
            const auto pred = predict_label(model, fr.matrix);
            std::size_t correct = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == fr.matrix.labels[i] ? 1 : 0;
            const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
            const double ci = accuracy_ci(acc, pred.size());
            csv += name + "," + variants[v].name + "," + label_char(variants[v].label) + "," +
                   std::to_string(pred.size()) + "," + std::to_string(correct) + "," + format_double(acc) + "," +
                   format_double(ci) + "," + format_accuracy_cell(acc, ci) + "," +
                   std::to_string(fr.failures.size()) + "\n";
        }
    }
    outs.write("empirical_accuracy.csv", csv);
    return outs.finish();
}

std::vector<MwuRow> feature_mwu(const FeatureMatrix& matrix) {
    std::vector<MwuRow> rows;
    for (std::size_t j = 0; j < matrix.n_cols(); ++j) {
        std::vector<double> t, n;
        for (std::size_t i = 0; i < matrix.n_rows(); ++i)
            (matrix.labels[i] == Label::T ? t : n).push_back(matrix.rows[i][j]);
        if (t.empty() || n.empty()) throw ValidationError("feature matrix needs both T and N rows");
        const auto r = mann_whitney_u(t, n);
        rows.push_back({matrix.names[j], r.u, r.p_value, r.exact, t.size(), n.size()});
    }
    return rows;
}

namespace {

std::string mwu_csv(const std::vector<MwuRow>& rows, const std::string& dataset, FeatureSet set) {
    std::string out = "dataset,features,feature,u,p_value,method,n_T,n_N\n";
    for (const auto& r : rows)
        out += dataset + "," + std::string(to_string(set)) + "," + r.feature + "," + format_double(r.u) + "," +
               format_double(r.p_value) + "," + (r.exact ? "exact" : "normal") + "," + std::to_string(r.n_t) + "," +
               std::to_string(r.n_n) + "\n";
    return out;
}

}  // namespace

std::vector<fs::path> cmd_mwu_features(const RunConfig& config) {
    if (config.features_input) {
        if (config.out.empty()) throw ValidationError("out: output directory is required");
        if (!fs::is_regular_file(*config.features_input))
            throw ValidationError("input: feature matrix '" + config.features_input->string() + "' does not exist");
        const FeatureMatrix m = parse_features_csv(read_text(*config.features_input));
        json cfg{{"input", config.features_input->filename().string()}};
        Outputs outs(config.out, "mwu-features", cfg);
        outs.write("mwu.csv", mwu_csv(feature_mwu(m), config.features_input->stem().string(), m.set_id));
        return outs.finish();
    }
    config.validate();
    Outputs outs(config.out, "mwu-features", config_json(config));
    for (NoiseKind kind : config.noise_kinds) {
        const std::string code(1, noise_code(kind));
        const std::uint64_t s = kind_seed(*config.seed, kind);
        DatasetRequest req;
        req.noise_kind = kind;
        req.n_trans = req.n_null = config.mwu_per_class;
        req.seed = s;
        const WindowSet windows = slice_dataset(generate_dataset(req), code, s, config.window_length);
        for (FeatureSet set : config.feature_sets) {
            const auto fr = featurize(windows, set, false);
            const std::string tag = code + std::string(feature_code(set));
            outs.write("features_" + tag + ".csv", features_csv(fr.matrix));
            outs.write("mwu_" + tag + ".csv", mwu_csv(feature_mwu(fr.matrix), code, set));
        }
    }
    return outs.finish();
}

}  // namespace epiwarn
