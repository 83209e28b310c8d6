#include "evicheck/feedback/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "evicheck/error.hpp"

namespace evicheck::feedback {

namespace {

std::int64_t system_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

nlohmann::json header() { return {{"schema", kLogSchema}, {"version", kLogVersion}}; }

void write_all(int fd, const std::string& line, const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kExportError,
                  "write to " + path.string() + " failed: " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

bool keep(const ExportFilter& filter, Category category, std::int64_t created_at) {
  if (created_at < filter.since_ms) return false;
  return filter.categories.empty() || filter.categories.contains(category);
}

FeedbackRecord base_record(const service::DocumentVerdict& v, const std::string& claim_text,
                           const std::string& user_id) {
  FeedbackRecord r;
  r.verdict_id = v.verdict_id;
  r.session_id = v.session_id;
  r.claim_text = claim_text;
  r.page_id = v.page_id;
  r.window_offset = v.window.offset;
  r.window_size = v.window.size;
  r.shown_label = v.label;
  r.shown_mask = v.evidence_mask;
  r.user_id = user_id;
  return r;
}

std::pair<service::DocumentVerdict, std::string> lookup(const service::VerdictService& verdicts,
                                                        const std::string& verdict_id) {
  auto v = verdicts.find_verdict(verdict_id);
  if (!v) throw Error(ErrorCode::kNotFound, "unknown verdict " + verdict_id);
  auto s = verdicts.find_session(v->session_id);
  if (!s) throw Error(ErrorCode::kNotFound, "verdict " + verdict_id + " has no session");
  return {std::move(*v), s->query.raw};
}

}  // namespace

FeedbackStore::FeedbackStore(std::filesystem::path log, Clock clock)
    : path_(std::move(log)), clock_(clock ? std::move(clock) : Clock(system_ms)) {
  if (path_.empty()) return;
  load();
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::kInvalidConfig, "cannot open " + path_.string() + ": " + std::strerror(errno));
  }
  if (::lseek(fd_, 0, SEEK_END) == 0) write_all(fd_, header().dump() + "\n", path_);
}

FeedbackStore::~FeedbackStore() {
  if (fd_ >= 0) ::close(fd_);
}

void FeedbackStore::load() {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kCorruptRecord, path_.string() + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (lineno == 1) {
      if (j != header()) fail("unrecognised feedback log header");
      continue;
    }
    try {
      auto record = record_from_json(j.at("record"));
      std::optional<TrustedAnnotation> annotation;
      if (j.contains("annotation")) annotation = annotation_from_json(j["annotation"]);
      const bool wants_annotation = record.category == Category::kAgreed ||
                                    record.category == Category::kCorrectedEvidence;
      if (wants_annotation != annotation.has_value()) fail("annotation does not match the record category");
      if (annotation && annotation->record_id != record.record_id) fail("annotation traces to another record");
      if (record.record_id.size() > 1) {
        next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(record.record_id.substr(1)) + 1);
      }
      by_key_.emplace(std::pair{record.verdict_id, record.user_id}, records_.size());
      records_.push_back(std::move(record));
      if (annotation) annotations_.push_back(std::move(*annotation));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kCorruptRecord) throw;
      fail(e.what());
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
}

FeedbackRecord FeedbackStore::append(FeedbackRecord record,
                                     std::optional<TrustedAnnotation> annotation) {
  std::lock_guard lock(mu_);
  const auto key = std::pair{record.verdict_id, record.user_id};
  if (auto it = by_key_.find(key); it != by_key_.end()) return records_[it->second];

  record.record_id = "f" + std::to_string(next_id_);
  record.created_at_ms = clock_();
  record.validate();
  nlohmann::json line = {{"record", record_to_json(record)}};
  if (annotation) {
    annotation->record_id = record.record_id;
    annotation->created_at_ms = record.created_at_ms;
    annotation->validate();
    line["annotation"] = annotation_to_json(*annotation);
  }
  // One write per line so a reader never sees half a record.
  if (fd_ >= 0) write_all(fd_, line.dump() + "\n", path_);

  ++next_id_;
  by_key_.emplace(key, records_.size());
  records_.push_back(record);
  if (annotation) annotations_.push_back(std::move(*annotation));
  return record;
}

FeedbackRecord FeedbackStore::record_agreement(const service::DocumentVerdict& verdict,
                                               const std::string& claim_text,
                                               const std::string& user_id) {
  auto record = base_record(verdict, claim_text, user_id);
  record.agree = true;
  record.category = Category::kAgreed;
  TrustedAnnotation a;
  a.claim_text = claim_text;
  a.tokens = verdict.tokens;
  a.label = verdict.label;
  a.mask = verdict.evidence_mask;
  a.provenance = Provenance::kMachineAgreed;
  return append(std::move(record), std::move(a));
}

FeedbackRecord FeedbackStore::record_correction(const service::DocumentVerdict& verdict,
                                                const std::string& claim_text, Category category,
                                                std::optional<model::Label> corrected_label,
                                                std::optional<model::RationaleMask> corrected_mask,
                                                const std::string& user_id) {
  if (category == Category::kAgreed) {
    throw Error(ErrorCode::kInvalidInput, "use record_agreement for agreements");
  }
  auto record = base_record(verdict, claim_text, user_id);
  record.category = category;
  record.corrected_label = corrected_label;
  record.corrected_mask = std::move(corrected_mask);
  record.validate();
  std::optional<TrustedAnnotation> annotation;
  if (category == Category::kCorrectedEvidence) {
    annotation.emplace();
    annotation->claim_text = claim_text;
    annotation->tokens = verdict.tokens;
    annotation->label = *record.corrected_label;
    annotation->mask = *record.corrected_mask;
    annotation->provenance = Provenance::kHumanCorrected;
  }
  return append(std::move(record), std::move(annotation));
}

FeedbackRecord FeedbackStore::record_agreement(const service::VerdictService& verdicts,
                                               const std::string& verdict_id,
                                               const std::string& user_id) {
  const auto [verdict, claim] = lookup(verdicts, verdict_id);
  return record_agreement(verdict, claim, user_id);
}

FeedbackRecord FeedbackStore::record_correction(const service::VerdictService& verdicts,
                                                const std::string& verdict_id, Category category,
                                                std::optional<model::Label> corrected_label,
                                                std::optional<model::RationaleMask> corrected_mask,
                                                const std::string& user_id) {
  const auto [verdict, claim] = lookup(verdicts, verdict_id);
  return record_correction(verdict, claim, category, corrected_label, std::move(corrected_mask),
                           user_id);
}

std::vector<FeedbackRecord> FeedbackStore::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::vector<TrustedAnnotation> FeedbackStore::annotations() const {
  std::lock_guard lock(mu_);
  return annotations_;
}

std::size_t FeedbackStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

Export FeedbackStore::export_dataset(const ExportFilter& filter) const {
  std::lock_guard lock(mu_);
  std::map<std::string, Category> category_of;
  Export out;
  for (const auto& r : records_) {
    category_of.emplace(r.record_id, r.category);
    if ((r.category == Category::kMisleading || r.category == Category::kIrrelevant) &&
        keep(filter, r.category, r.created_at_ms)) {
      out.flagged.push_back(r);
    }
  }
  for (const auto& a : annotations_) {
    if (keep(filter, category_of.at(a.record_id), a.created_at_ms)) out.annotations.push_back(a);
  }
  return out;
}

void write_export(const Export& data, std::ostream& training, std::ostream& sidecar) {
  for (const auto& a : data.annotations) training << annotation_to_json(a).dump() << '\n';
  for (const auto& r : data.flagged) sidecar << record_to_json(r).dump() << '\n';
  training.flush();
  sidecar.flush();
  if (!training || !sidecar) throw Error(ErrorCode::kExportError, "failed to write the export");
}

Export read_export(std::istream& training, std::istream& sidecar) {
  Export out;
  std::string line;
  while (std::getline(training, line)) {
    if (line.empty()) continue;
    try {
      out.annotations.push_back(annotation_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptRecord, std::string("bad training line: ") + e.what());
    }
  }
  while (std::getline(sidecar, line)) {
    if (line.empty()) continue;
    try {
      auto r = record_from_json(nlohmann::json::parse(line));
      if (r.category != Category::kMisleading && r.category != Category::kIrrelevant) {
        throw Error(ErrorCode::kCorruptRecord, "sidecar holds a " +
                                                   std::string(category_name(r.category)) + " record");
      }
      out.flagged.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptRecord, std::string("bad sidecar line: ") + e.what());
    }
  }
  return out;
}

model::TwoPhaseModel fine_tune(const Export& data, const model::TwoPhaseModel& base,
                               const model::ModelConfig& config,
                               std::span<const model::TrainingInstance> base_corpus) {
  if (data.annotations.empty()) {
    throw Error(ErrorCode::kInvalidInput, "the export holds no training records");
  }
  std::vector<model::TrainingInstance> dataset(base_corpus.begin(), base_corpus.end());
  for (const auto& a : data.annotations) dataset.push_back(a.to_instance());
  return model::train_two_phase(dataset, config, &base);
}

}  // namespace evicheck::feedback
