#include "evicheck/api/api.hpp"

#include <charconv>
#include <regex>
#include <sstream>

#include "evicheck/error.hpp"

namespace evicheck::api {

namespace {

// Thrown inside handlers for request-shape problems; carries the status.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void reject(int status, std::string code, std::string message) {
  throw HttpError{status, std::move(code), std::move(message)};
}

Response json_response(int status, const nlohmann::json& body) {
  return Response{status, "application/json", body.dump()};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyClaim:
    case ErrorCode::kInvalidInput:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kNoMoreContent:
      return 409;
    case ErrorCode::kOutOfRange:
      return 422;
    case ErrorCode::kProviderError:
    case ErrorCode::kContentNotFound:
      return 502;
    default:
      return 500;
  }
}

nlohmann::json parse_body(const Request& request) {
  if (request.body.empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(request.body);
    if (!j.is_object()) reject(400, "invalid-input", "request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    reject(400, "invalid-input", std::string("malformed JSON: ") + e.what());
  }
}

std::int64_t parse_int(const std::string& text, const char* name) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) reject(400, "invalid-input", std::string(name) + " must be an integer");
  return value;
}

feedback::ExportFilter parse_filter(const Request& request) {
  feedback::ExportFilter filter;
  if (auto it = request.query.find("since"); it != request.query.end() && !it->second.empty()) {
    filter.since_ms = parse_int(it->second, "since");
  }
  if (auto it = request.query.find("categories"); it != request.query.end()) {
    std::stringstream list(it->second);
    std::string name;
    while (std::getline(list, name, ',')) {
      if (name.empty()) continue;
      try {
        filter.categories.insert(feedback::parse_category(name));
      } catch (const Error& e) {
        reject(400, "invalid-input", e.what());
      }
    }
  }
  return filter;
}

}  // namespace

nlohmann::json verdict_payload(const service::DocumentVerdict& v) {
  nlohmann::json visible = nlohmann::json::array();
  for (const auto& t : v.snippet) visible.push_back(t.visible ? 1 : 0);
  nlohmann::json view = nlohmann::json::array();
  for (const auto& slot : service::collapse(v.snippet)) {
    if (slot) {
      view.push_back(*slot);
    } else {
      view.push_back(nullptr);
    }
  }
  return {
      {"verdict_id", v.verdict_id},
      {"session_id", v.session_id},
      {"rank", v.rank},
      {"page_id", v.page_id},
      {"title", v.title},
      {"url", v.url},
      {"label", model::label_name(v.label)},
      {"label_probs",
       {{"SUPPORTS", v.label_probs[static_cast<std::size_t>(model::Label::kSupports)]},
        {"REFUTES", v.label_probs[static_cast<std::size_t>(model::Label::kRefutes)]}}},
      {"has_more", v.window.has_more},
      {"truncated", v.truncated},
      {"window",
       {{"offset", v.window.offset},
        {"size", v.window.size},
        {"total_sentences", v.window.total_sentences},
        {"sentences", v.window.sentences}}},
      {"snippet", {{"tokens", v.tokens}, {"mask", v.evidence_mask.bits()}, {"visible", visible}, {"view", view}}},
  };
}

nlohmann::json session_payload(const service::ClaimSession& s, const service::VerdictService& verdicts) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& id : s.verdict_ids) {
    if (auto v = verdicts.find_verdict(id)) list.push_back(verdict_payload(*v));
  }
  return {
      {"session_id", s.session_id},
      {"claim", s.query.raw},
      {"created_at", s.created_at_ms},
      {"no_results", list.empty()},
      {"verdicts", list},
      {"warnings", s.warnings},
  };
}

nlohmann::json error_payload(int status, std::string_view code, const std::string& message) {
  return {{"error", {{"status", status}, {"code", code}, {"message", message}}}};
}

Response Api::handle(const Request& request) {
  static const std::regex kVerdictAction(R"(^/verdicts/([^/]+)/(more|feedback)$)");
  static const std::regex kVerdict(R"(^/verdicts/([^/]+)$)");
  static const std::regex kSession(R"(^/sessions/([^/]+)$)");
  std::smatch m;
  const auto& path = request.path;
  const bool post = request.method == "POST";
  const bool get = request.method == "GET";
  try {
    if (path == "/claims") {
      if (post) return post_claims(request);
    } else if (std::regex_match(path, m, kVerdictAction)) {
      if (post) return m[2] == "more" ? post_more(m[1]) : post_feedback(m[1], request);
    } else if (std::regex_match(path, m, kVerdict)) {
      if (get) return get_verdict(m[1]);
    } else if (std::regex_match(path, m, kSession)) {
      if (get) return get_session(m[1]);
    } else if (path == "/export" || path == "/export/flagged") {
      if (get) return get_export(request, path == "/export/flagged");
    } else if (path == "/health") {
      if (get) return json_response(200, {{"status", "ok"}});
    } else {
      return json_response(404, error_payload(404, "not-found", "no route for " + path));
    }
    return json_response(405, error_payload(405, "method-not-allowed", request.method + " " + path));
  } catch (const HttpError& e) {
    return json_response(e.status, error_payload(e.status, e.code, e.message));
  } catch (const Error& e) {
    const int status = status_for(e.code());
    return json_response(status, error_payload(status, error_code_name(e.code()), e.what()));
  } catch (const std::exception& e) {
    return json_response(500, error_payload(500, "internal", e.what()));
  }
}

Response Api::post_claims(const Request& request) {
  const auto body = parse_body(request);
  if (!body.contains("claim") || !body["claim"].is_string()) {
    reject(400, "invalid-input", "'claim' must be a string");
  }
  std::optional<std::size_t> k;
  if (body.contains("k") && !body["k"].is_null()) {
    if (!body["k"].is_number_integer()) reject(422, "out-of-range", "'k' must be an integer");
    const auto value = body["k"].get<std::int64_t>();
    if (value < 1) reject(422, "out-of-range", "'k' must be at least 1");
    k = static_cast<std::size_t>(value);
  }
  const auto session = verdicts_.check_claim(body["claim"].get<std::string>(), k);
  return json_response(200, session_payload(session, verdicts_));
}

Response Api::post_more(const std::string& verdict_id) {
  return json_response(200, verdict_payload(verdicts_.extend_verdict(verdict_id)));
}

Response Api::post_feedback(const std::string& verdict_id, const Request& request) {
  const auto body = parse_body(request);
  if (!verdicts_.find_verdict(verdict_id)) {
    reject(404, "not-found", "unknown verdict " + verdict_id);
  }
  std::string user = "anonymous";
  if (body.contains("user_id")) {
    if (!body["user_id"].is_string() || body["user_id"].get<std::string>().empty()) {
      reject(422, "invalid-input", "'user_id' must be a non-empty string");
    }
    user = body["user_id"].get<std::string>();
  }

  const bool agree = body.contains("agree") && body["agree"].is_boolean() && body["agree"].get<bool>();
  if (body.contains("agree") && !body["agree"].is_boolean()) {
    reject(422, "invalid-input", "'agree' must be a boolean");
  }

  std::optional<feedback::Category> category;
  std::optional<model::Label> label;
  std::optional<model::RationaleMask> mask;
  try {
    if (body.contains("category")) {
      if (!body["category"].is_string()) reject(422, "invalid-input", "'category' must be a string");
      category = feedback::parse_category(body["category"].get<std::string>());
    }
    if (body.contains("corrected_label") && !body["corrected_label"].is_null()) {
      if (!body["corrected_label"].is_string()) reject(422, "invalid-input", "'corrected_label' must be a string");
      label = model::parse_label(body["corrected_label"].get<std::string>());
    }
    if (body.contains("corrected_mask") && !body["corrected_mask"].is_null()) {
      const auto& arr = body["corrected_mask"];
      if (!arr.is_array()) reject(422, "invalid-input", "'corrected_mask' must be an array of 0/1");
      std::vector<std::uint8_t> bits;
      for (const auto& b : arr) {
        if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
          reject(422, "invalid-input", "'corrected_mask' must be an array of 0/1");
        }
        bits.push_back(static_cast<std::uint8_t>(b.get<int>()));
      }
      mask = model::RationaleMask(std::move(bits));
    }

    feedback::FeedbackRecord record;
    if (agree) {
      if (category && *category != feedback::Category::kAgreed) {
        reject(422, "invalid-input", "agree=true only goes with category 'agreed'");
      }
      if (label || mask) reject(422, "invalid-input", "an agreement carries no corrections");
      record = feedback_.record_agreement(verdicts_, verdict_id, user);
    } else {
      if (!category) reject(422, "invalid-input", "either agree=true or a category is required");
      if (*category == feedback::Category::kAgreed) {
        reject(422, "invalid-input", "category 'agreed' requires agree=true");
      }
      record = feedback_.record_correction(verdicts_, verdict_id, *category, label, std::move(mask), user);
    }
    return json_response(200, {{"record_id", record.record_id},
                               {"category", feedback::category_name(record.category)},
                               {"created_at", record.created_at_ms}});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidInput) reject(422, "invalid-input", e.what());
    throw;
  }
}

Response Api::get_export(const Request& request, bool flagged) {
  const auto data = feedback_.export_dataset(parse_filter(request));
  std::ostringstream training, sidecar;
  feedback::write_export(data, training, sidecar);
  return Response{200, "application/x-ndjson", flagged ? sidecar.str() : training.str()};
}

Response Api::get_session(const std::string& session_id) {
  const auto session = verdicts_.find_session(session_id);
  if (!session) reject(404, "not-found", "unknown session " + session_id);
  return json_response(200, session_payload(*session, verdicts_));
}

Response Api::get_verdict(const std::string& verdict_id) {
  const auto verdict = verdicts_.find_verdict(verdict_id);
  if (!verdict) reject(404, "not-found", "unknown verdict " + verdict_id);
  return json_response(200, verdict_payload(*verdict));
}

}  // namespace evicheck::api
