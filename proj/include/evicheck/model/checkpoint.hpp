#pragma once
// Versioned, self-describing checkpoint: a single JSON document holding the
// config plus, per phase, vocabulary, encoder shape and flat parameters.

#include <filesystem>

#include <json.hpp>

#include "evicheck/model/models.hpp"

namespace evicheck::model {

inline constexpr const char* kCheckpointFormat = "evicheck-checkpoint";
inline constexpr int kCheckpointVersion = 1;

nlohmann::json config_to_json(const ModelConfig& config);
// Missing keys keep their defaults. The result is validated.
ModelConfig config_from_json(const nlohmann::json& j, ModelConfig base = {});

nlohmann::json checkpoint_to_json(const TwoPhaseModel& model);
TwoPhaseModel checkpoint_from_json(const nlohmann::json& j);

// When `path` is a directory, or does not exist and has no extension, the
// file is `path / "checkpoint.json"`.
std::filesystem::path resolve_checkpoint_path(const std::filesystem::path& path);
void save_checkpoint(const std::filesystem::path& path, const TwoPhaseModel& model);
TwoPhaseModel load_checkpoint(const std::filesystem::path& path);

}  // namespace evicheck::model
