#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evicheck/model/types.hpp"

namespace evicheck::feedback {

enum class Category { kAgreed, kCorrectedEvidence, kMisleading, kIrrelevant };
enum class Provenance { kMachineAgreed, kHumanCorrected };

std::string_view category_name(Category c);
// kInvalidInput for anything but the four wire names.
Category parse_category(std::string_view name);
std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view name);

struct FeedbackRecord {
  std::string record_id;
  std::string verdict_id;
  std::string session_id;
  std::string claim_text;
  std::string page_id;
  std::size_t window_offset = 0;
  std::size_t window_size = 0;
  model::Label shown_label = model::Label::kSupports;
  model::RationaleMask shown_mask;
  bool agree = false;
  Category category = Category::kAgreed;
  std::optional<model::Label> corrected_label;
  std::optional<model::RationaleMask> corrected_mask;
  std::string user_id;
  std::int64_t created_at_ms = 0;

  // agree <=> agreed; agreed carries no corrections; corrected-evidence needs
  // a label and a mask aligned with shown_mask; flags carry no mask.
  // kInvalidInput on violation.
  void validate() const;

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

struct TrustedAnnotation {
  std::string record_id;  // the feedback record it came from
  std::string claim_text;
  std::vector<std::string> tokens;
  model::Label label = model::Label::kSupports;
  model::RationaleMask mask;
  Provenance provenance = Provenance::kMachineAgreed;
  std::int64_t created_at_ms = 0;

  void validate() const;
  model::TrainingInstance to_instance() const;

  friend bool operator==(const TrustedAnnotation&, const TrustedAnnotation&) = default;
};

// Parsing validates; malformed or inconsistent input is kCorruptRecord.
nlohmann::json record_to_json(const FeedbackRecord& r);
FeedbackRecord record_from_json(const nlohmann::json& j);

// Training-corpus schema (claim, document, label, rationale) plus the
// annotation's own fields, so an export doubles as a corpus file.
nlohmann::json annotation_to_json(const TrustedAnnotation& a);
TrustedAnnotation annotation_from_json(const nlohmann::json& j);

}  // namespace evicheck::feedback
