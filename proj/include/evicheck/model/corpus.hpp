#pragma once
// Line-delimited JSON training records. One object per line:
//   {"claim": [tok...], "document": [tok...], "label": "SUPPORTS"|"REFUTES",
//    "rationale": [0|1 ...]}
// Extra keys are ignored on read, which lets the feedback export add
// provenance fields to the same schema.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "evicheck/model/types.hpp"

namespace evicheck::model {

nlohmann::json instance_to_json(const TrainingInstance& instance);
// Throws kCorruptRecord on schema violations.
TrainingInstance instance_from_json(const nlohmann::json& record);

std::vector<TrainingInstance> read_corpus(std::istream& in);
std::vector<TrainingInstance> read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const TrainingInstance> instances);
void write_corpus(const std::filesystem::path& path, std::span<const TrainingInstance> instances);

}  // namespace evicheck::model
