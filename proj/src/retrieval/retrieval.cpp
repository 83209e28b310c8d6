#include "evicheck/retrieval/retrieval.hpp"

#include <cctype>

#include "evicheck/error.hpp"
#include "evicheck/retrieval/text.hpp"

namespace evicheck::retrieval {

Query preprocess_claim(const std::string& raw) {
  std::string normalized;
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      pending_space = !normalized.empty();
      continue;
    }
    if (pending_space) normalized.push_back(' ');
    pending_space = false;
    normalized.push_back(static_cast<char>(std::tolower(c)));
  }
  if (normalized.empty()) throw Error(ErrorCode::kEmptyClaim, "claim is empty");
  return Query{raw, std::move(normalized)};
}

std::vector<SearchResult> search(const Query& query, std::size_t k, SearchProvider& provider,
                                 std::size_t max_k) {
  if (k < 1 || k > max_k) {
    throw Error(ErrorCode::kOutOfRange,
                "k must be between 1 and " + std::to_string(max_k) + ", got " + std::to_string(k));
  }
  std::vector<SearchResult> results = provider.search(query, k);
  if (results.size() > k) results.resize(k);
  for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = i + 1;
  return results;
}

DocumentContent fetch_content(const SearchResult& result, ContentProvider& provider) {
  RawPage page = provider.fetch(result.page_id);
  DocumentContent content;
  content.page_id = result.page_id;
  content.title = page.title.empty() ? result.title : page.title;
  content.sentences = segment_sentences(strip_markup(page.text));
  content.fetched_at = std::chrono::system_clock::now();
  if (content.sentences.empty()) {
    throw Error(ErrorCode::kContentNotFound, "page " + result.page_id + " has no text");
  }
  return content;
}

DocumentWindow window(const DocumentContent& content, std::int64_t offset, std::int64_t size) {
  if (offset < 0) throw Error(ErrorCode::kInvalidInput, "window offset must be non-negative");
  if (size < 1) throw Error(ErrorCode::kInvalidInput, "window size must be positive");
  const auto total = content.sentences.size();
  const auto begin = std::min(static_cast<std::size_t>(offset), total);
  const auto end = std::min(begin + static_cast<std::size_t>(size), total);
  DocumentWindow w;
  w.page_id = content.page_id;
  w.offset = static_cast<std::size_t>(offset);
  w.size = static_cast<std::size_t>(size);
  w.sentences.assign(content.sentences.begin() + static_cast<std::ptrdiff_t>(begin),
                     content.sentences.begin() + static_cast<std::ptrdiff_t>(end));
  w.has_more = static_cast<std::size_t>(offset) + static_cast<std::size_t>(size) < total;
  w.total_sentences = total;
  return w;
}

}  // namespace evicheck::retrieval
