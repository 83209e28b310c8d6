#include "evicheck/feedback/records.hpp"

#include "evicheck/error.hpp"
#include "evicheck/model/corpus.hpp"

namespace evicheck::feedback {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, "feedback record: " + what);
}

template <typename F>
auto corrupt_on_failure(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string(what) + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptRecord) throw;
    throw Error(ErrorCode::kCorruptRecord, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kAgreed: return "agreed";
    case Category::kCorrectedEvidence: return "corrected-evidence";
    case Category::kMisleading: return "misleading";
    case Category::kIrrelevant: return "irrelevant";
  }
  return "?";
}

Category parse_category(std::string_view name) {
  for (auto c : {Category::kAgreed, Category::kCorrectedEvidence, Category::kMisleading,
                 Category::kIrrelevant}) {
    if (category_name(c) == name) return c;
  }
  throw Error(ErrorCode::kInvalidInput, "unknown feedback category '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance p) {
  return p == Provenance::kMachineAgreed ? "machine-agreed" : "human-corrected";
}

Provenance parse_provenance(std::string_view name) {
  if (name == "machine-agreed") return Provenance::kMachineAgreed;
  if (name == "human-corrected") return Provenance::kHumanCorrected;
  throw Error(ErrorCode::kInvalidInput, "unknown provenance '" + std::string(name) + "'");
}

void FeedbackRecord::validate() const {
  if (verdict_id.empty()) invalid("verdict_id is empty");
  if (user_id.empty()) invalid("user_id is empty");
  if (agree != (category == Category::kAgreed)) invalid("agree must be set exactly for 'agreed'");
  switch (category) {
    case Category::kAgreed:
      if (corrected_label || corrected_mask) invalid("an agreement carries no corrections");
      break;
    case Category::kCorrectedEvidence:
      if (!corrected_label) invalid("corrected-evidence needs corrected_label");
      if (!corrected_mask) invalid("corrected-evidence needs corrected_mask");
      if (corrected_mask->size() != shown_mask.size()) {
        invalid("corrected_mask has " + std::to_string(corrected_mask->size()) +
                " bits for a window of " + std::to_string(shown_mask.size()) + " tokens");
      }
      break;
    case Category::kMisleading:
    case Category::kIrrelevant:
      if (corrected_mask) invalid(std::string(category_name(category)) + " carries no mask");
      break;
  }
}

void TrustedAnnotation::validate() const {
  if (mask.size() != tokens.size()) invalid("annotation mask does not align with its tokens");
  if (record_id.empty()) invalid("annotation without a source record");
}

model::TrainingInstance TrustedAnnotation::to_instance() const {
  model::TrainingInstance inst;
  inst.claim = model::TokenSequence(model::tokenize(claim_text));
  inst.document = model::TokenSequence(tokens);
  inst.gold_label = label;
  inst.gold_mask = mask;
  inst.validate();
  return inst;
}

nlohmann::json record_to_json(const FeedbackRecord& r) {
  nlohmann::json j = {
      {"record_id", r.record_id},
      {"verdict_id", r.verdict_id},
      {"session_id", r.session_id},
      {"claim_text", r.claim_text},
      {"page_id", r.page_id},
      {"window_offset", r.window_offset},
      {"window_size", r.window_size},
      {"shown_label", model::label_name(r.shown_label)},
      {"shown_mask", r.shown_mask.bits()},
      {"agree", r.agree},
      {"category", category_name(r.category)},
      {"user_id", r.user_id},
      {"created_at", r.created_at_ms},
  };
  if (r.corrected_label) j["corrected_label"] = model::label_name(*r.corrected_label);
  if (r.corrected_mask) j["corrected_mask"] = r.corrected_mask->bits();
  return j;
}

FeedbackRecord record_from_json(const nlohmann::json& j) {
  return corrupt_on_failure("bad feedback record", [&] {
    FeedbackRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.verdict_id = j.at("verdict_id").get<std::string>();
    r.session_id = j.at("session_id").get<std::string>();
    r.claim_text = j.at("claim_text").get<std::string>();
    r.page_id = j.at("page_id").get<std::string>();
    r.window_offset = j.at("window_offset").get<std::size_t>();
    r.window_size = j.at("window_size").get<std::size_t>();
    r.shown_label = model::parse_label(j.at("shown_label").get<std::string>());
    r.shown_mask = model::RationaleMask(j.at("shown_mask").get<std::vector<std::uint8_t>>());
    r.agree = j.at("agree").get<bool>();
    r.category = parse_category(j.at("category").get<std::string>());
    if (j.contains("corrected_label")) {
      r.corrected_label = model::parse_label(j["corrected_label"].get<std::string>());
    }
    if (j.contains("corrected_mask")) {
      r.corrected_mask = model::RationaleMask(j["corrected_mask"].get<std::vector<std::uint8_t>>());
    }
    r.user_id = j.at("user_id").get<std::string>();
    r.created_at_ms = j.at("created_at").get<std::int64_t>();
    r.validate();
    return r;
  });
}

nlohmann::json annotation_to_json(const TrustedAnnotation& a) {
  auto j = model::instance_to_json(a.to_instance());
  j["claim_text"] = a.claim_text;
  j["provenance"] = provenance_name(a.provenance);
  j["record_id"] = a.record_id;
  j["created_at"] = a.created_at_ms;
  return j;
}

TrustedAnnotation annotation_from_json(const nlohmann::json& j) {
  return corrupt_on_failure("bad training record", [&] {
    const auto inst = model::instance_from_json(j);
    TrustedAnnotation a;
    a.record_id = j.at("record_id").get<std::string>();
    a.claim_text = j.at("claim_text").get<std::string>();
    a.tokens = inst.document.tokens();
    a.label = inst.gold_label;
    a.mask = inst.gold_mask;
    a.provenance = parse_provenance(j.at("provenance").get<std::string>());
    a.created_at_ms = j.at("created_at").get<std::int64_t>();
    a.validate();
    return a;
  });
}

}  // namespace evicheck::feedback
