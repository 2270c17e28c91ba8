// epiwarn: simulate | experiment | sweep | classify-empirical | mwu-features
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiwarn/errors.hpp"
#include "epiwarn/pipeline.hpp"

namespace {

using namespace epiwarn;

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::size_t start = 0;
        while (start <= item.size()) {
            const std::size_t comma = std::min(item.find(',', start), item.size());
            if (comma > start) out.push_back(item.substr(start, comma - start));
            start = comma + 1;
        }
    }
    return out;
}

EmpiricalMode parse_mode(const std::string& s) {
    if (s == "incidence") return EmpiricalMode::Incidence;
    if (s == "prevalence") return EmpiricalMode::Prevalence;
    throw ValidationError("mode must be incidence or prevalence, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outbreak early-warning classifiers trained on stochastic SIR simulations"};
    app.fallthrough();
    app.require_subcommand(1, 1);
    app.set_config("--config", "", "key = value config file; command-line flags take precedence");

    std::uint64_t seed = 0;
    std::string out, sweep_kind = "rolling", input, models_dir;
    std::string t_data, t_mode = "incidence", n_data, n_mode = "prevalence";
    double t_si_mean = 6.3, t_si_sd = 4.2, n_si_mean = 8.4, n_si_sd = 3.8;
    std::vector<std::string> noise, features, models;
    int train_per_class = 0, test_per_class = 0, window_length = kDefaultWindowLength, mwu_per_class = 200;
    bool desk = false, no_mixed = false;

    auto* seed_opt = app.add_option("--seed", seed, "run seed (required)");
    app.add_option("--out", out, "output directory (created if missing)");
    app.add_flag("--desk-scale", desk, "600 train + 150 test per class, white and environmental noise");
    auto* noise_opt = app.add_option("--noise", noise, "noise kinds: white,environmental,demographic");
    auto* feat_opt = app.add_option("--features", features, "feature sets: 22,5");
    auto* model_opt = app.add_option("--models", models, "models: GBM,LRM,KNN,SVM");
    app.add_option("--sweep-kind", sweep_kind, "rolling or expanding");
    auto* train_opt = app.add_option("--train-per-class", train_per_class, "training windows per class");
    auto* test_opt = app.add_option("--test-per-class", test_per_class, "test windows per class");
    app.add_flag("--no-mixed", no_mixed, "skip the mixed-noise dataset");
    app.add_option("--window-length", window_length, "window length");
    app.add_option("--mwu-per-class", mwu_per_class, "windows per class for mwu-features");
    app.add_option("--input", input, "feature matrix CSV for mwu-features");
    app.add_option("--models-dir", models_dir, "directory of model JSON files for classify-empirical");
    app.add_option("--t-data", t_data, "outbreak series for T windows");
    app.add_option("--t-mode", t_mode, "incidence or prevalence");
    app.add_option("--t-si-mean", t_si_mean, "serial interval mean (days)");
    app.add_option("--t-si-sd", t_si_sd, "serial interval sd (days)");
    app.add_option("--n-data", n_data, "non-outbreak series for N windows");
    app.add_option("--n-mode", n_mode, "incidence or prevalence");
    app.add_option("--n-si-mean", n_si_mean, "serial interval mean (days)");
    app.add_option("--n-si-sd", n_si_sd, "serial interval sd (days)");

    auto* simulate = app.add_subcommand("simulate", "write trajectories and labelled windows");
    auto* experiment = app.add_subcommand("experiment", "train and evaluate the classifier grid");
    auto* sweep = app.add_subcommand("sweep", "rolling or expanding window sweep");
    auto* classify = app.add_subcommand("classify-empirical", "apply trained models to empirical series");
    auto* mwu = app.add_subcommand("mwu-features", "Mann-Whitney U test of every feature between labels");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (desk) apply_desk_scale(cfg);
        if (seed_opt->count() > 0) cfg.seed = seed;
        cfg.out = out;
        if (noise_opt->count() > 0) {
            cfg.noise_kinds.clear();
            for (const auto& s : split_list(noise)) cfg.noise_kinds.push_back(parse_noise_kind(s));
        }
        if (feat_opt->count() > 0) {
            cfg.feature_sets.clear();
            for (const auto& s : split_list(features)) cfg.feature_sets.push_back(parse_feature_set(s));
        }
        if (model_opt->count() > 0) {
            cfg.model_kinds.clear();
            for (const auto& s : split_list(models)) cfg.model_kinds.push_back(parse_model_kind(s));
        }
        if (train_opt->count() > 0) cfg.train_per_class = train_per_class;
        if (test_opt->count() > 0) cfg.test_per_class = test_per_class;
        cfg.include_mixed = !no_mixed;
        cfg.sweep_kind = parse_sweep_kind(sweep_kind);
        cfg.window_length = window_length;
        cfg.mwu_per_class = mwu_per_class;
        if (!input.empty()) cfg.features_input = input;
        cfg.models_dir = models_dir;
        if (!t_data.empty()) cfg.empirical_t = EmpiricalSource{t_data, parse_mode(t_mode), {t_si_mean, t_si_sd}};
        if (!n_data.empty()) cfg.empirical_n = EmpiricalSource{n_data, parse_mode(n_mode), {n_si_mean, n_si_sd}};

        std::vector<std::filesystem::path> written;
        if (*simulate) written = cmd_simulate(cfg);
        else if (*experiment) written = cmd_experiment(cfg);
        else if (*sweep) written = cmd_sweep(cfg);
        else if (*classify) written = cmd_classify_empirical(cfg);
        else if (*mwu) written = cmd_mwu_features(cfg);
        for (const auto& p : written) std::printf("%s\n", p.string().c_str());
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
