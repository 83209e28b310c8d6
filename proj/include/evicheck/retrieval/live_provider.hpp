#pragma once
// Live bindings: a web-search JSON API (Programmable Search style) for
// ranking and the MediaWiki action API for plain-text page extracts.

#include <optional>
#include <string>

#include "evicheck/retrieval/http.hpp"
#include "evicheck/retrieval/retrieval.hpp"

namespace evicheck::retrieval {

inline constexpr const char* kDefaultSearchEndpoint = "https://www.googleapis.com/customsearch/v1";
inline constexpr const char* kDefaultWikiEndpoint = "https://en.wikipedia.org/w/api.php";

struct WebSearchCredentials {
  std::string api_key;
  std::string engine_id;

  // Reads SEARCH_API_KEY and SEARCH_ENGINE_ID; kInvalidConfig when unset.
  static WebSearchCredentials from_env();
};

class WebSearchProvider final : public SearchProvider {
 public:
  WebSearchProvider(HttpClient& http, WebSearchCredentials credentials,
                    std::string endpoint = kDefaultSearchEndpoint, RateLimiter* limiter = nullptr);

  std::vector<SearchResult> search(const Query& query, std::size_t k) override;

  std::string request_url(const Query& query, std::size_t k) const;

 private:
  HttpClient& http_;
  WebSearchCredentials credentials_;
  std::string endpoint_;
  RateLimiter* limiter_;
};

class WikiContentProvider final : public ContentProvider {
 public:
  explicit WikiContentProvider(HttpClient& http, std::string endpoint = kDefaultWikiEndpoint,
                               RateLimiter* limiter = nullptr);

  RawPage fetch(const std::string& page_id) override;

  std::string request_url(const std::string& page_id) const;

 private:
  HttpClient& http_;
  std::string endpoint_;
  RateLimiter* limiter_;
};

// "https://en.wikipedia.org/wiki/Microsoft_Corporation" -> "Microsoft_Corporation".
std::optional<std::string> wiki_page_id_from_url(const std::string& url);

}  // namespace evicheck::retrieval
