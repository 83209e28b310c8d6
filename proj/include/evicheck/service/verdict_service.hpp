#pragma once
// One claim check end to end: preprocess, search top-k, fetch, window,
// per-document prediction and snippet construction. Owns the sessions that
// later feedback refers to.

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evicheck/model/models.hpp"
#include "evicheck/retrieval/content_cache.hpp"
#include "evicheck/retrieval/retrieval.hpp"
#include "evicheck/service/snippet.hpp"

namespace evicheck::service {

// Whatever produces a verdict for one (claim, document window) pair.
class FactChecker {
 public:
  virtual ~FactChecker() = default;
  virtual model::PipelinePrediction check(const model::TokenSequence& claim,
                                          const model::TokenSequence& document) const = 0;
};

class TwoPhaseChecker final : public FactChecker {
 public:
  explicit TwoPhaseChecker(const model::TwoPhaseModel& model)
      : TwoPhaseChecker(model, model.phase1.config()) {}
  // `config` may override inference settings such as the evidence threshold.
  TwoPhaseChecker(const model::TwoPhaseModel& model, model::ModelConfig config)
      : model_(model), config_(std::move(config)) {
    config_.validate();
  }
  model::PipelinePrediction check(const model::TokenSequence& claim,
                                  const model::TokenSequence& document) const override {
    return model::predict(claim, document, model_.phase1, model_.phase2, config_);
  }

 private:
  const model::TwoPhaseModel& model_;
  model::ModelConfig config_;
};

struct DocumentVerdict {
  std::string verdict_id;
  std::string session_id;
  std::size_t rank = 0;
  std::string page_id;
  std::string title;
  std::string url;
  retrieval::DocumentWindow window;
  std::vector<std::string> tokens;  // tokenised window sentences
  model::Label label = model::Label::kSupports;
  std::array<double, model::kNumLabels> label_probs{};
  model::RationaleMask evidence_mask;  // one bit per entry of `tokens`
  Snippet snippet;
  bool truncated = false;  // tokens past the model's input limit got no evidence

  friend bool operator==(const DocumentVerdict&, const DocumentVerdict&) = default;
};

struct ClaimSession {
  std::string session_id;
  retrieval::Query query;
  std::int64_t created_at_ms = 0;
  std::vector<std::string> verdict_ids;  // in search-rank order
  std::vector<std::string> warnings;     // pages skipped because they failed to fetch
};

nlohmann::json verdict_to_json(const DocumentVerdict& verdict);
DocumentVerdict verdict_from_json(const nlohmann::json& j);
nlohmann::json session_to_json(const ClaimSession& session);
ClaimSession session_from_json(const nlohmann::json& j);

struct ServiceConfig {
  std::size_t default_k = retrieval::kDefaultTopK;
  std::size_t max_k = retrieval::kMaxTopK;
  std::size_t window_size = retrieval::kDefaultWindowSize;
  std::size_t context = kDefaultContext;
  // Sentences at the start of an article whose tokens are always shown.
  std::size_t lead_sentences = 1;
  std::chrono::seconds cache_ttl{3600};
  // Empty: sessions live in memory only.
  std::filesystem::path session_log;
  std::function<std::int64_t()> now_ms = [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
};

class VerdictService {
 public:
  VerdictService(retrieval::SearchProvider& search, retrieval::ContentProvider& content,
                 const FactChecker& checker, ServiceConfig config = {});

  // Empty claims are kEmptyClaim; k outside [1, max_k] is kOutOfRange. Pages
  // that fail to fetch are skipped with a warning.
  ClaimSession check_claim(const std::string& raw_claim, std::optional<std::size_t> k = {});

  // Advances the verdict to its next window and re-predicts. kNotFound for
  // unknown ids, kNoMoreContent at the end of the document.
  DocumentVerdict extend_verdict(const std::string& verdict_id);

  std::optional<ClaimSession> find_session(const std::string& session_id) const;
  std::optional<DocumentVerdict> find_verdict(const std::string& verdict_id) const;

  const ServiceConfig& config() const { return config_; }

 private:
  DocumentVerdict evaluate_window(const retrieval::DocumentContent& content,
                                  const model::TokenSequence& claim, std::size_t offset) const;
  void append_log(const nlohmann::json& record);
  void load_log();
  std::mutex& verdict_lock(const std::string& verdict_id);

  retrieval::SearchProvider& search_;
  const FactChecker& checker_;
  ServiceConfig config_;
  retrieval::ContentCache cache_;

  mutable std::mutex mu_;
  std::map<std::string, ClaimSession> sessions_;
  std::map<std::string, DocumentVerdict> verdicts_;
  std::map<std::string, std::unique_ptr<std::mutex>> verdict_locks_;
  std::uint64_t next_session_ = 1;
  std::uint64_t next_verdict_ = 1;
  std::mutex log_mu_;
};

}  // namespace evicheck::service
