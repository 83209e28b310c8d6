#pragma once
// Claim preprocessing, provider-backed search, content fetch and sentence
// windowing.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace evicheck::retrieval {

inline constexpr std::size_t kDefaultTopK = 3;
inline constexpr std::size_t kMaxTopK = 10;
inline constexpr std::size_t kDefaultWindowSize = 30;

struct Query {
  std::string raw;
  std::string normalized;  // lowercase, trimmed, single-spaced
};

// Throws kEmptyClaim when nothing is left after normalisation.
Query preprocess_claim(const std::string& raw);

struct SearchResult {
  std::size_t rank = 0;  // 1-based
  std::string title;
  std::string url;
  std::string page_id;
  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

// Provider-side page payload before markup stripping and segmentation.
struct RawPage {
  std::string page_id;
  std::string title;
  std::string text;
};

struct DocumentContent {
  std::string page_id;
  std::string title;
  std::vector<std::string> sentences;
  std::chrono::system_clock::time_point fetched_at;
};

struct DocumentWindow {
  std::string page_id;
  std::size_t offset = 0;
  std::size_t size = kDefaultWindowSize;
  std::vector<std::string> sentences;
  bool has_more = false;
  std::size_t total_sentences = 0;
  friend bool operator==(const DocumentWindow&, const DocumentWindow&) = default;
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  // Rank-ordered results, at most `k`. Transport failures are kProviderError.
  virtual std::vector<SearchResult> search(const Query& query, std::size_t k) = 0;
};

class ContentProvider {
 public:
  virtual ~ContentProvider() = default;
  // kContentNotFound for unknown pages, kProviderError on transport failure.
  virtual RawPage fetch(const std::string& page_id) = 0;
};

// 1 <= k <= max_k, otherwise kOutOfRange. Never returns more than k results
// and keeps provider order, renumbering ranks 1..n.
std::vector<SearchResult> search(const Query& query, std::size_t k, SearchProvider& provider,
                                 std::size_t max_k = kMaxTopK);

// Fetches the page, strips markup and splits it into sentences.
DocumentContent fetch_content(const SearchResult& result, ContentProvider& provider);

// sentences[offset, offset + size) clipped to the document. Negative offset or
// non-positive size is kInvalidInput.
DocumentWindow window(const DocumentContent& content, std::int64_t offset,
                      std::int64_t size = static_cast<std::int64_t>(kDefaultWindowSize));

}  // namespace evicheck::retrieval
