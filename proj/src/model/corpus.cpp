#include "evicheck/model/corpus.hpp"

#include <fstream>
#include <string>

#include "evicheck/error.hpp"

namespace evicheck::model {

using nlohmann::json;

json instance_to_json(const TrainingInstance& instance) {
  return json{{"claim", instance.claim.tokens()},
              {"document", instance.document.tokens()},
              {"label", label_name(instance.gold_label)},
              {"rationale", instance.gold_mask.bits()}};
}

TrainingInstance instance_from_json(const json& record) {
  try {
    TrainingInstance inst;
    inst.claim = TokenSequence(record.at("claim").get<std::vector<std::string>>());
    inst.document = TokenSequence(record.at("document").get<std::vector<std::string>>());
    inst.gold_label = parse_label(record.at("label").get<std::string>());
    inst.gold_mask = RationaleMask(record.at("rationale").get<std::vector<std::uint8_t>>());
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("malformed training record: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("invalid training record: ") + e.what());
  }
}

std::vector<TrainingInstance> read_corpus(std::istream& in) {
  std::vector<TrainingInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorruptRecord,
                  "line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(instance_from_json(record));
  }
  return out;
}

std::vector<TrainingInstance> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open corpus " + path.string());
  return read_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const TrainingInstance> instances) {
  for (const auto& inst : instances) out << instance_to_json(inst).dump() << '\n';
}

void write_corpus(const std::filesystem::path& path, std::span<const TrainingInstance> instances) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kExportError, "cannot write corpus " + path.string());
  write_corpus(out, instances);
  if (!out) throw Error(ErrorCode::kExportError, "write failed for " + path.string());
}

}  // namespace evicheck::model
