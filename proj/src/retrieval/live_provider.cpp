#include "evicheck/retrieval/live_provider.hpp"

#include <cstdlib>

#include <json.hpp>

#include "evicheck/error.hpp"
#include "evicheck/retrieval/text.hpp"

namespace evicheck::retrieval {

using nlohmann::json;

namespace {

json parse_body(const HttpResponse& res, const std::string& what) {
  if (res.status == 429 || res.status >= 500) {
    throw Error(ErrorCode::kProviderError, what + " returned HTTP " + std::to_string(res.status));
  }
  if (res.status != 200) {
    throw Error(ErrorCode::kProviderError, what + " rejected the request with HTTP " +
                                               std::to_string(res.status));
  }
  try {
    return json::parse(res.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderError, what + " returned malformed JSON: " + e.what());
  }
}

}  // namespace

WebSearchCredentials WebSearchCredentials::from_env() {
  const char* key = std::getenv("SEARCH_API_KEY");
  const char* cx = std::getenv("SEARCH_ENGINE_ID");
  if (key == nullptr || cx == nullptr || !*key || !*cx) {
    throw Error(ErrorCode::kInvalidConfig,
                "live search needs SEARCH_API_KEY and SEARCH_ENGINE_ID in the environment");
  }
  return {key, cx};
}

WebSearchProvider::WebSearchProvider(HttpClient& http, WebSearchCredentials credentials,
                                     std::string endpoint, RateLimiter* limiter)
    : http_(http),
      credentials_(std::move(credentials)),
      endpoint_(std::move(endpoint)),
      limiter_(limiter) {}

std::string WebSearchProvider::request_url(const Query& query, std::size_t k) const {
  return endpoint_ + "?key=" + url_encode(credentials_.api_key) +
         "&cx=" + url_encode(credentials_.engine_id) + "&q=" + url_encode(query.normalized) +
         "&num=" + std::to_string(k);
}

std::vector<SearchResult> WebSearchProvider::search(const Query& query, std::size_t k) {
  if (limiter_) limiter_->acquire();
  const json body = parse_body(http_.get(request_url(query, k)), "search provider");
  std::vector<SearchResult> out;
  if (!body.contains("items")) return out;
  for (const auto& item : body.at("items")) {
    if (out.size() == k) break;
    const std::string link = item.value("link", "");
    const auto page_id = wiki_page_id_from_url(link);
    if (!page_id) continue;
    std::string title = item.value("title", *page_id);
    constexpr std::string_view kSuffix = " - Wikipedia";
    if (title.size() > kSuffix.size() && title.ends_with(kSuffix)) {
      title.resize(title.size() - kSuffix.size());
    }
    out.push_back(SearchResult{out.size() + 1, std::move(title), link, *page_id});
  }
  return out;
}

WikiContentProvider::WikiContentProvider(HttpClient& http, std::string endpoint,
                                         RateLimiter* limiter)
    : http_(http), endpoint_(std::move(endpoint)), limiter_(limiter) {}

std::string WikiContentProvider::request_url(const std::string& page_id) const {
  return endpoint_ +
         "?action=query&prop=extracts&explaintext=1&redirects=1&format=json&formatversion=2"
         "&titles=" +
         url_encode(page_id);
}

RawPage WikiContentProvider::fetch(const std::string& page_id) {
  if (limiter_) limiter_->acquire();
  const json body = parse_body(http_.get(request_url(page_id)), "content provider");
  try {
    const auto& pages = body.at("query").at("pages");
    if (pages.empty()) throw Error(ErrorCode::kContentNotFound, "no page '" + page_id + "'");
    const json& page = pages.is_array() ? pages.at(0) : pages.begin().value();
    if (page.contains("missing") || page.contains("invalid")) {
      throw Error(ErrorCode::kContentNotFound, "no page '" + page_id + "'");
    }
    return RawPage{page_id, page.value("title", page_id), page.value("extract", "")};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderError, std::string("unexpected content payload: ") + e.what());
  }
}

std::optional<std::string> wiki_page_id_from_url(const std::string& url) {
  const std::string marker = "/wiki/";
  const auto at = url.find(marker);
  if (at == std::string::npos) return std::nullopt;
  std::string id = url.substr(at + marker.size());
  if (const auto cut = id.find_first_of("?#"); cut != std::string::npos) id.resize(cut);
  if (id.empty()) return std::nullopt;
  return url_decode(id);
}

}  // namespace evicheck::retrieval
