#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epiwarn/dataset.hpp"
#include "epiwarn/features.hpp"
#include "epiwarn/learners.hpp"
#include "epiwarn/sde.hpp"

namespace epiwarn {

inline constexpr int kModelSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::vector<std::string> split_csv_line(std::string_view line);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Columnar trajectory table: replicate_id,t,I.
std::string trajectories_csv(const std::vector<Trajectory>& trajectories, std::string_view prefix);
/// Sidecar: per replicate parameters, seed and transition time.
nlohmann::json trajectories_manifest(const std::vector<Trajectory>& trajectories, std::string_view prefix,
                                     NoiseKind kind, std::uint64_t seed);

/// window_id,label,gap,length,v1..vL (shorter windows padded with empty fields).
std::string windows_csv(const WindowSet& windows);
WindowSet parse_windows_csv(std::string_view text);
nlohmann::json windows_manifest(const WindowSet& windows);

/// window_id,label,<feature names in canonical order>.
std::string features_csv(const FeatureMatrix& matrix);
FeatureMatrix parse_features_csv(std::string_view text);

nlohmann::json sir_params_to_json(const SirParams& p);
nlohmann::json model_to_json(const TrainedModel& model);
/// Rejects documents with a different schema name or version.
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace epiwarn
