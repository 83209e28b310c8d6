#pragma once
// Append-only feedback log. Each line holds one FeedbackRecord and, for
// agreements and evidence corrections, the TrustedAnnotation derived from it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evicheck/feedback/records.hpp"
#include "evicheck/model/models.hpp"
#include "evicheck/service/verdict_service.hpp"

namespace evicheck::feedback {

inline constexpr const char* kLogSchema = "evicheck.feedback";
inline constexpr int kLogVersion = 1;

struct ExportFilter {
  std::set<Category> categories;  // empty: every category
  std::int64_t since_ms = 0;      // records created before this are dropped
};

struct Export {
  std::vector<TrustedAnnotation> annotations;
  std::vector<FeedbackRecord> flagged;  // misleading / irrelevant
  friend bool operator==(const Export&, const Export&) = default;
};

class FeedbackStore {
 public:
  using Clock = std::function<std::int64_t()>;

  // Empty path keeps everything in memory. An existing log is replayed and
  // validated; a bad header or record is kCorruptRecord.
  explicit FeedbackStore(std::filesystem::path log = {}, Clock clock = {});
  ~FeedbackStore();
  FeedbackStore(const FeedbackStore&) = delete;
  FeedbackStore& operator=(const FeedbackStore&) = delete;

  // Both operations are idempotent per (verdict_id, user_id): a repeat
  // returns the first record and writes nothing.
  FeedbackRecord record_agreement(const service::DocumentVerdict& verdict,
                                  const std::string& claim_text, const std::string& user_id);
  FeedbackRecord record_correction(const service::DocumentVerdict& verdict,
                                   const std::string& claim_text, Category category,
                                   std::optional<model::Label> corrected_label,
                                   std::optional<model::RationaleMask> corrected_mask,
                                   const std::string& user_id);

  // Verdict lookups through the service; unknown ids are kNotFound.
  FeedbackRecord record_agreement(const service::VerdictService& verdicts,
                                  const std::string& verdict_id, const std::string& user_id);
  FeedbackRecord record_correction(const service::VerdictService& verdicts,
                                   const std::string& verdict_id, Category category,
                                   std::optional<model::Label> corrected_label,
                                   std::optional<model::RationaleMask> corrected_mask,
                                   const std::string& user_id);

  std::vector<FeedbackRecord> records() const;
  std::vector<TrustedAnnotation> annotations() const;
  std::size_t size() const;

  // Consistent snapshot of the store under the filter.
  Export export_dataset(const ExportFilter& filter = {}) const;

 private:
  FeedbackRecord append(FeedbackRecord record, std::optional<TrustedAnnotation> annotation);
  void load();

  std::filesystem::path path_;
  Clock clock_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::vector<FeedbackRecord> records_;
  std::vector<TrustedAnnotation> annotations_;
  std::map<std::pair<std::string, std::string>, std::size_t> by_key_;  // -> records_ index
  std::uint64_t next_id_ = 1;
};

// Training lines go to `training`, flagged records to `sidecar`. Stream
// failures are kExportError.
void write_export(const Export& data, std::ostream& training, std::ostream& sidecar);
Export read_export(std::istream& training, std::istream& sidecar);

// Retrains both phases, warm-started from `base`, on base_corpus plus the
// exported annotations. No annotations is kInvalidInput.
model::TwoPhaseModel fine_tune(const Export& data, const model::TwoPhaseModel& base,
                               const model::ModelConfig& config,
                               std::span<const model::TrainingInstance> base_corpus = {});

}  // namespace evicheck::feedback
