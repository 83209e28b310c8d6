#include "evicheck/model/checkpoint.hpp"

#include <fstream>

#include "evicheck/error.hpp"

namespace evicheck::model {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return json{{"max_length", c.max_length},     {"lambda", c.lambda},
              {"evidence_threshold", c.evidence_threshold},
              {"wildcard", c.wildcard},         {"embedding_dim", c.embedding_dim},
              {"label_hidden", c.label_hidden}, {"epochs", c.epochs},
              {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j, ModelConfig c) {
  try {
    auto read = [&j](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    read("max_length", c.max_length);
    read("lambda", c.lambda);
    read("evidence_threshold", c.evidence_threshold);
    read("wildcard", c.wildcard);
    read("embedding_dim", c.embedding_dim);
    read("label_hidden", c.label_hidden);
    read("epochs", c.epochs);
    read("learning_rate", c.learning_rate);
    read("batch_size", c.batch_size);
    read("seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

json encoder_to_json(const Vocabulary& vocab, const Encoder& enc, const std::vector<double>& hist) {
  return json{{"vocabulary", vocab.tokens()},
              {"shape",
               {{"vocab", enc.shape().vocab},
                {"dim", enc.shape().dim},
                {"hidden", enc.shape().hidden}}},
              {"params", std::vector<double>(enc.params().begin(), enc.params().end())},
              {"history", hist}};
}

template <typename M>
M phase_from_json(const json& j, const ModelConfig& config) {
  Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
  const EncoderShape shape{j.at("shape").at("vocab").get<std::size_t>(),
                           j.at("shape").at("dim").get<std::size_t>(),
                           j.at("shape").at("hidden").get<std::size_t>()};
  Encoder enc(shape, j.at("params").get<std::vector<double>>());
  return M(config, std::move(vocab), std::move(enc), j.value("history", std::vector<double>{}));
}

}  // namespace

json checkpoint_to_json(const TwoPhaseModel& model) {
  return json{{"format", kCheckpointFormat},
              {"version", kCheckpointVersion},
              {"config", config_to_json(model.phase1.config())},
              {"screening", {{"kept", model.screened_in}, {"dropped", model.screened_out}}},
              {"phase1", encoder_to_json(model.phase1.vocabulary(), model.phase1.encoder(),
                                         model.phase1.history())},
              {"phase2", encoder_to_json(model.phase2.vocabulary(), model.phase2.encoder(),
                                         model.phase2.history())}};
}

TwoPhaseModel checkpoint_from_json(const json& j) {
  try {
    if (j.value("format", "") != kCheckpointFormat) {
      throw Error(ErrorCode::kCorruptRecord, "not an evicheck checkpoint");
    }
    if (j.value("version", 0) != kCheckpointVersion) {
      throw Error(ErrorCode::kCorruptRecord,
                  "unsupported checkpoint version " + std::to_string(j.value("version", 0)));
    }
    const ModelConfig config = config_from_json(j.at("config"));
    return TwoPhaseModel{phase_from_json<Phase1Model>(j.at("phase1"), config),
                         phase_from_json<Phase2Model>(j.at("phase2"), config),
                         j.at("screening").value("kept", std::size_t{0}),
                         j.at("screening").value("dropped", std::size_t{0})};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("malformed checkpoint: ") + e.what());
  }
}

std::filesystem::path resolve_checkpoint_path(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "checkpoint.json";
  // "ckpt/" or "ckpt" that does not exist yet names a directory to create.
  if (!std::filesystem::exists(path) && !path.has_extension()) return path / "checkpoint.json";
  return path;
}

void save_checkpoint(const std::filesystem::path& path, const TwoPhaseModel& model) {
  const auto file = resolve_checkpoint_path(path);
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kExportError, "cannot write checkpoint " + tmp.string());
    out << checkpoint_to_json(model).dump();
    if (!out) throw Error(ErrorCode::kExportError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

TwoPhaseModel load_checkpoint(const std::filesystem::path& path) {
  const auto file = resolve_checkpoint_path(path);
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open checkpoint " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("checkpoint is not JSON: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace evicheck::model
