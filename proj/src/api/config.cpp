#include "evicheck/api/config.hpp"

#include <fstream>
#include <set>

#include "evicheck/error.hpp"
#include "evicheck/model/checkpoint.hpp"

namespace evicheck::api {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

void ApiConfig::validate() const {
  if (port < 0 || port > 65535) bad("port must lie in [0, 65535]");
  if (k == 0 || k > retrieval::kMaxTopK) bad("k must lie in [1, " + std::to_string(retrieval::kMaxTopK) + "]");
  if (window == 0) bad("window must be positive");
  if (lambda < 0) bad("lambda must be non-negative");
  if (!(threshold > 0 && threshold < 1)) bad("threshold must lie in (0, 1)");
  if (requests_per_second <= 0) bad("requests_per_second must be positive");
  if (cache_ttl_seconds < 0) bad("cache_ttl_seconds must be non-negative");
}

void ApiConfig::check_paths() const {
  validate();
  if (provider == ProviderKind::kFixture && !std::filesystem::is_directory(fixtures)) {
    bad("fixture directory '" + fixtures.string() + "' does not exist");
  }
  if (checkpoint.empty()) bad("no checkpoint configured");
  if (!std::filesystem::exists(model::resolve_checkpoint_path(checkpoint))) {
    bad("checkpoint '" + checkpoint.string() + "' does not exist");
  }
}

ApiConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  static const std::set<std::string> kKeys = {
      "host", "port", "provider", "fixtures", "search_endpoint", "wiki_endpoint",
      "requests_per_second", "cache_ttl_seconds", "checkpoint", "store", "k", "window",
      "context", "lead_sentences", "lambda", "threshold"};
  if (!j.is_object()) bad("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) bad("unknown config key '" + key + "'");
  }
  ApiConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    const auto provider = j.value("provider", std::string("fixture"));
    if (provider == "fixture") {
      c.provider = ProviderKind::kFixture;
    } else if (provider == "live") {
      c.provider = ProviderKind::kLive;
    } else {
      bad("provider must be 'fixture' or 'live'");
    }
    c.fixtures = resolve(base_dir, j.value("fixtures", std::string()));
    c.search_endpoint = j.value("search_endpoint", c.search_endpoint);
    c.wiki_endpoint = j.value("wiki_endpoint", c.wiki_endpoint);
    c.requests_per_second = j.value("requests_per_second", c.requests_per_second);
    c.cache_ttl_seconds = j.value("cache_ttl_seconds", c.cache_ttl_seconds);
    c.checkpoint = resolve(base_dir, j.value("checkpoint", std::string()));
    c.store = resolve(base_dir, j.value("store", std::string()));
    c.k = j.value("k", c.k);
    c.window = j.value("window", c.window);
    c.context = j.value("context", c.context);
    c.lead_sentences = j.value("lead_sentences", c.lead_sentences);
    c.lambda = j.value("lambda", c.lambda);
    c.threshold = j.value("threshold", c.threshold);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ApiConfig& c) {
  return {
      {"host", c.host},
      {"port", c.port},
      {"provider", c.provider == ProviderKind::kFixture ? "fixture" : "live"},
      {"fixtures", c.fixtures.string()},
      {"search_endpoint", c.search_endpoint},
      {"wiki_endpoint", c.wiki_endpoint},
      {"requests_per_second", c.requests_per_second},
      {"cache_ttl_seconds", c.cache_ttl_seconds},
      {"checkpoint", c.checkpoint.string()},
      {"store", c.store.string()},
      {"k", c.k},
      {"window", c.window},
      {"context", c.context},
      {"lead_sentences", c.lead_sentences},
      {"lambda", c.lambda},
      {"threshold", c.threshold},
  };
}

ApiConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace evicheck::api
