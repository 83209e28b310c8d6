#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "evicheck/retrieval/live_provider.hpp"
#include "evicheck/retrieval/retrieval.hpp"
#include "evicheck/service/snippet.hpp"

namespace evicheck::api {

enum class ProviderKind { kFixture, kLive };

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;

  ProviderKind provider = ProviderKind::kFixture;
  std::filesystem::path fixtures;
  std::string search_endpoint = retrieval::kDefaultSearchEndpoint;
  std::string wiki_endpoint = retrieval::kDefaultWikiEndpoint;
  double requests_per_second = 5.0;
  std::int64_t cache_ttl_seconds = 3600;

  std::filesystem::path checkpoint;
  // Directory holding sessions.jsonl and feedback.jsonl; empty keeps both in memory.
  std::filesystem::path store;

  std::size_t k = retrieval::kDefaultTopK;
  std::size_t window = retrieval::kDefaultWindowSize;
  std::size_t context = service::kDefaultContext;
  std::size_t lead_sentences = 1;
  double lambda = 1.0;
  double threshold = 0.5;

  // Value ranges only. kInvalidConfig on violation.
  void validate() const;
  // validate() plus: referenced files exist. kInvalidConfig otherwise.
  void check_paths() const;
};

// Unknown keys are rejected so typos do not silently fall back to defaults.
// Relative paths resolve against `base_dir`.
ApiConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ApiConfig& config);
ApiConfig load_config(const std::filesystem::path& path);

}  // namespace evicheck::api
