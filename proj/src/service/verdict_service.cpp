#include "evicheck/service/verdict_service.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>

#include "evicheck/error.hpp"

namespace evicheck::service {

namespace {

constexpr const char* kLogSchema = "evicheck.sessions";
constexpr int kLogVersion = 1;

std::string next_id(char prefix, std::uint64_t& counter) {
  return std::string(1, prefix) + std::to_string(counter++);
}

// Restores a counter from an id like "v12" so new ids never collide.
void bump_counter(const std::string& id, std::uint64_t& counter) {
  if (id.size() < 2) return;
  try {
    counter = std::max<std::uint64_t>(counter, std::stoull(id.substr(1)) + 1);
  } catch (const std::exception&) {
  }
}

}  // namespace

nlohmann::json verdict_to_json(const DocumentVerdict& v) {
  nlohmann::json visible = nlohmann::json::array();
  for (const auto& t : v.snippet) visible.push_back(t.visible ? 1 : 0);
  return {
      {"verdict_id", v.verdict_id},
      {"session_id", v.session_id},
      {"rank", v.rank},
      {"page_id", v.page_id},
      {"title", v.title},
      {"url", v.url},
      {"window",
       {{"offset", v.window.offset},
        {"size", v.window.size},
        {"sentences", v.window.sentences},
        {"has_more", v.window.has_more},
        {"total_sentences", v.window.total_sentences}}},
      {"tokens", v.tokens},
      {"label", model::label_name(v.label)},
      {"label_probs", v.label_probs},
      {"evidence_mask", v.evidence_mask.bits()},
      {"visible", visible},
      {"truncated", v.truncated},
  };
}

DocumentVerdict verdict_from_json(const nlohmann::json& j) {
  try {
    DocumentVerdict v;
    v.verdict_id = j.at("verdict_id").get<std::string>();
    v.session_id = j.at("session_id").get<std::string>();
    v.rank = j.at("rank").get<std::size_t>();
    v.page_id = j.at("page_id").get<std::string>();
    v.title = j.at("title").get<std::string>();
    v.url = j.at("url").get<std::string>();
    const auto& w = j.at("window");
    v.window.page_id = v.page_id;
    v.window.offset = w.at("offset").get<std::size_t>();
    v.window.size = w.at("size").get<std::size_t>();
    v.window.sentences = w.at("sentences").get<std::vector<std::string>>();
    v.window.has_more = w.at("has_more").get<bool>();
    v.window.total_sentences = w.at("total_sentences").get<std::size_t>();
    v.tokens = j.at("tokens").get<std::vector<std::string>>();
    v.label = model::parse_label(j.at("label").get<std::string>());
    v.label_probs = j.at("label_probs").get<std::array<double, model::kNumLabels>>();
    v.evidence_mask = model::RationaleMask(j.at("evidence_mask").get<std::vector<std::uint8_t>>());
    v.truncated = j.at("truncated").get<bool>();
    const auto visible = j.at("visible").get<std::vector<int>>();
    if (visible.size() != v.tokens.size() || v.evidence_mask.size() != v.tokens.size()) {
      throw Error(ErrorCode::kCorruptRecord, "verdict arrays do not align with its tokens");
    }
    v.snippet.resize(v.tokens.size());
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
      v.snippet[i] = SnippetToken{v.tokens[i], v.evidence_mask[i] == 1, visible[i] != 0};
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("bad verdict record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptRecord) throw;
    throw Error(ErrorCode::kCorruptRecord, std::string("bad verdict record: ") + e.what());
  }
}

nlohmann::json session_to_json(const ClaimSession& s) {
  return {
      {"session_id", s.session_id},
      {"claim", s.query.raw},
      {"normalized_claim", s.query.normalized},
      {"created_at", s.created_at_ms},
      {"verdict_ids", s.verdict_ids},
      {"warnings", s.warnings},
  };
}

ClaimSession session_from_json(const nlohmann::json& j) {
  try {
    ClaimSession s;
    s.session_id = j.at("session_id").get<std::string>();
    s.query.raw = j.at("claim").get<std::string>();
    s.query.normalized = j.at("normalized_claim").get<std::string>();
    s.created_at_ms = j.at("created_at").get<std::int64_t>();
    s.verdict_ids = j.at("verdict_ids").get<std::vector<std::string>>();
    s.warnings = j.value("warnings", std::vector<std::string>{});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptRecord, std::string("bad session record: ") + e.what());
  }
}

VerdictService::VerdictService(retrieval::SearchProvider& search,
                               retrieval::ContentProvider& content, const FactChecker& checker,
                               ServiceConfig config)
    : search_(search),
      checker_(checker),
      config_(std::move(config)),
      cache_(content, config_.cache_ttl) {
  if (config_.window_size == 0) throw Error(ErrorCode::kInvalidConfig, "window_size must be positive");
  if (config_.default_k == 0 || config_.default_k > config_.max_k) {
    throw Error(ErrorCode::kInvalidConfig, "default k must lie in [1, max_k]");
  }
  if (!config_.session_log.empty()) load_log();
}

DocumentVerdict VerdictService::evaluate_window(const retrieval::DocumentContent& content,
                                                const model::TokenSequence& claim,
                                                std::size_t offset) const {
  DocumentVerdict v;
  v.page_id = content.page_id;
  v.title = content.title;
  v.window = retrieval::window(content, static_cast<std::int64_t>(offset),
                               static_cast<std::int64_t>(config_.window_size));

  std::size_t lead = 0;
  for (std::size_t s = 0; s < v.window.sentences.size(); ++s) {
    auto words = model::tokenize(v.window.sentences[s]);
    // Only the opening sentences of the article count as lead.
    if (offset + s < config_.lead_sentences) lead += words.size();
    v.tokens.insert(v.tokens.end(), std::make_move_iterator(words.begin()),
                    std::make_move_iterator(words.end()));
  }

  const auto prediction = checker_.check(claim, model::TokenSequence(v.tokens));
  v.label = prediction.label;
  v.label_probs = prediction.label_probs;
  v.truncated = prediction.truncated;
  auto bits = prediction.mask.bits();
  bits.resize(v.tokens.size(), 0);
  v.evidence_mask = model::RationaleMask(std::move(bits));
  v.snippet = build_snippet(v.tokens, v.evidence_mask, lead, config_.context);
  return v;
}

ClaimSession VerdictService::check_claim(const std::string& raw_claim,
                                         std::optional<std::size_t> k) {
  const auto query = retrieval::preprocess_claim(raw_claim);
  const auto results = retrieval::search(query, k.value_or(config_.default_k), search_, config_.max_k);
  const model::TokenSequence claim(model::tokenize(query.normalized));

  std::vector<std::future<std::optional<DocumentVerdict>>> pending;
  std::vector<std::string> warnings(results.size());
  pending.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    pending.push_back(std::async(std::launch::async, [&, i]() -> std::optional<DocumentVerdict> {
      const auto& result = results[i];
      try {
        auto content = cache_.get(result);
        auto v = evaluate_window(*content, claim, 0);
        v.rank = result.rank;
        v.url = result.url;
        if (!result.title.empty()) v.title = result.title;
        return v;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kContentNotFound && e.code() != ErrorCode::kProviderError) throw;
        warnings[i] = result.page_id + ": " + e.what();
        return std::nullopt;
      }
    }));
  }

  std::vector<DocumentVerdict> verdicts;
  for (auto& f : pending) {
    if (auto v = f.get()) verdicts.push_back(std::move(*v));
  }

  ClaimSession session;
  session.query = query;
  session.created_at_ms = config_.now_ms();
  for (auto& w : warnings) {
    if (w.empty()) continue;
    std::cerr << "warning: skipped page " << w << '\n';
    session.warnings.push_back(std::move(w));
  }

  nlohmann::json log_records = nlohmann::json::array();
  {
    std::lock_guard lock(mu_);
    session.session_id = next_id('s', next_session_);
    for (auto& v : verdicts) {
      v.verdict_id = next_id('v', next_verdict_);
      v.session_id = session.session_id;
      session.verdict_ids.push_back(v.verdict_id);
    }
    for (auto& v : verdicts) {
      log_records.push_back({{"type", "verdict"}, {"data", verdict_to_json(v)}});
      verdicts_.emplace(v.verdict_id, std::move(v));
    }
    sessions_.emplace(session.session_id, session);
  }
  append_log({{"type", "session"}, {"data", session_to_json(session)}});
  for (const auto& r : log_records) append_log(r);
  return session;
}

std::mutex& VerdictService::verdict_lock(const std::string& verdict_id) {
  std::lock_guard lock(mu_);
  if (!verdicts_.contains(verdict_id)) {
    throw Error(ErrorCode::kNotFound, "unknown verdict " + verdict_id);
  }
  auto& slot = verdict_locks_[verdict_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

DocumentVerdict VerdictService::extend_verdict(const std::string& verdict_id) {
  std::lock_guard verdict_guard(verdict_lock(verdict_id));
  DocumentVerdict current;
  ClaimSession session;
  {
    std::lock_guard lock(mu_);
    current = verdicts_.at(verdict_id);
    session = sessions_.at(current.session_id);
  }
  if (!current.window.has_more) {
    throw Error(ErrorCode::kNoMoreContent, "no more content for verdict " + verdict_id);
  }
  retrieval::SearchResult result{current.rank, current.title, current.url, current.page_id};
  auto content = cache_.get(result);
  const model::TokenSequence claim(model::tokenize(session.query.normalized));
  auto next = evaluate_window(*content, claim, current.window.offset + current.window.size);
  next.verdict_id = current.verdict_id;
  next.session_id = current.session_id;
  next.rank = current.rank;
  next.url = current.url;
  next.title = current.title;
  {
    std::lock_guard lock(mu_);
    verdicts_[verdict_id] = next;
  }
  append_log({{"type", "verdict"}, {"data", verdict_to_json(next)}});
  return next;
}

std::optional<ClaimSession> VerdictService::find_session(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

std::optional<DocumentVerdict> VerdictService::find_verdict(const std::string& verdict_id) const {
  std::lock_guard lock(mu_);
  auto it = verdicts_.find(verdict_id);
  if (it == verdicts_.end()) return std::nullopt;
  return it->second;
}

void VerdictService::append_log(const nlohmann::json& record) {
  if (config_.session_log.empty()) return;
  std::lock_guard lock(log_mu_);
  const bool fresh = !std::filesystem::exists(config_.session_log) ||
                     std::filesystem::file_size(config_.session_log) == 0;
  std::ofstream out(config_.session_log, std::ios::app);
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot open " + config_.session_log.string());
  if (fresh) out << nlohmann::json{{"schema", kLogSchema}, {"version", kLogVersion}}.dump() << '\n';
  out << record.dump() << '\n';
  out.flush();
}

void VerdictService::load_log() {
  std::ifstream in(config_.session_log);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptRecord, config_.session_log.string() + ":" +
                                                 std::to_string(lineno) + ": " + e.what());
    }
    if (lineno == 1) {
      if (j.value("schema", "") != kLogSchema || j.value("version", 0) != kLogVersion) {
        throw Error(ErrorCode::kCorruptRecord, "unrecognised session log header");
      }
      continue;
    }
    const auto type = j.value("type", "");
    if (type == "session") {
      auto s = session_from_json(j.at("data"));
      bump_counter(s.session_id, next_session_);
      sessions_[s.session_id] = std::move(s);
    } else if (type == "verdict") {
      // Later records supersede earlier ones, which replays show-more steps.
      auto v = verdict_from_json(j.at("data"));
      bump_counter(v.verdict_id, next_verdict_);
      verdicts_[v.verdict_id] = std::move(v);
    } else {
      throw Error(ErrorCode::kCorruptRecord, "unknown session log record type '" + type + "'");
    }
  }
}

}  // namespace evicheck::service
