#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epiwarn/dataset.hpp"
#include "epiwarn/features.hpp"
#include "epiwarn/incidence.hpp"
#include "epiwarn/learners.hpp"
#include "epiwarn/sde.hpp"

namespace epiwarn {

enum class SweepKind { Rolling, Expanding };
std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);

enum class EmpiricalMode { Incidence, Prevalence };

/// One empirical source for classify-empirical.
struct EmpiricalSource {
    std::filesystem::path path;
    EmpiricalMode mode = EmpiricalMode::Incidence;
    SerialInterval si;
};

struct RunConfig {
    std::vector<NoiseKind> noise_kinds = {NoiseKind::White, NoiseKind::Environmental, NoiseKind::Demographic};
    bool include_mixed = true;
    int train_per_class = 6000;
    int test_per_class = 1200;
    std::vector<FeatureSet> feature_sets = {FeatureSet::SF22, FeatureSet::EWSI5};
    std::vector<ModelKind> model_kinds = {ModelKind::GBM, ModelKind::LRM, ModelKind::KNN, ModelKind::SVM};
    SweepKind sweep_kind = SweepKind::Rolling;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
    bool desk_scale = false;
    int window_length = kDefaultWindowLength;

    // mwu-features
    std::optional<std::filesystem::path> features_input;
    int mwu_per_class = 200;

    // classify-empirical
    std::filesystem::path models_dir;
    std::optional<EmpiricalSource> empirical_t;  // outbreak series, T windows
    std::optional<EmpiricalSource> empirical_n;  // non-outbreak series, N windows
    int empirical_t_min_len = 14;
    int empirical_n_windows = 1200;
    int empirical_n_min_len = 8;
    int truncate_days = 7;
    double scale_factor = 5.0;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// 600 train + 150 test per class; WhiteN and EnvN (plus their mixture).
void apply_desk_scale(RunConfig& config);

/// Dataset letter used in classifier names: W, E, D or M.
char dataset_code(std::optional<NoiseKind> kind);
std::string classifier_name(char dataset, FeatureSet set, ModelKind model);

/// Windows of one dataset split into train and test.
struct DatasetSplit {
    char code = 'W';
    WindowSet train;
    WindowSet test;
};

/// Simulates, slices and partitions every requested noise kind, then builds
/// the mixture from the per-kind splits. Each kind's seed is derived from the
/// run seed and the kind alone, so restricting the kinds does not change the
/// data of those that remain.
std::vector<DatasetSplit> build_datasets(const RunConfig& config);
std::vector<Trajectory> simulate_kind(const RunConfig& config, NoiseKind kind);
std::uint64_t kind_seed(std::uint64_t seed, NoiseKind kind);

/// "1 (±0.0000)" / "0.9474 (±0.1004)".
std::string format_accuracy_cell(double accuracy, double halfwidth);

std::string sha256_hex(std::string_view bytes);

/// Every command writes under config.out and finishes with manifest.json
/// listing each output and its SHA-256. Returns the paths written.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& config);
std::vector<std::filesystem::path> cmd_experiment(const RunConfig& config);
std::vector<std::filesystem::path> cmd_sweep(const RunConfig& config);
std::vector<std::filesystem::path> cmd_classify_empirical(const RunConfig& config);
std::vector<std::filesystem::path> cmd_mwu_features(const RunConfig& config);

/// Tidy sweep rows for one (dataset, feature set, model) cell.
struct SweepRow {
    SweepKind kind = SweepKind::Rolling;
    int x = 0;  // D for rolling, L for expanding
    std::string classifier;
    EvalReport report;
    std::size_t n_train = 0;
    std::size_t n_dropped = 0;
};

std::vector<SweepRow> run_sweep_cell(const DatasetSplit& data, FeatureSet set, ModelKind model, SweepKind kind,
                                     const TrainConfig& train_config);

/// Windows from an empirical source: T windows (or N windows) plus the Re series.
struct EmpiricalWindows {
    IncidenceSeries series;
    ReSeries re;
    WindowSet windows;
};
EmpiricalWindows prepare_empirical(const EmpiricalSource& source, Label label, const RunConfig& config);

struct MwuRow {
    std::string feature;
    double u = 0.0;
    double p_value = 1.0;
    bool exact = false;
    std::size_t n_t = 0;
    std::size_t n_n = 0;
};
std::vector<MwuRow> feature_mwu(const FeatureMatrix& matrix);

}  // namespace epiwarn
