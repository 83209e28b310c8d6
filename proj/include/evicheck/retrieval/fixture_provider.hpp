#pragma once
// Deterministic offline provider backed by a directory of JSON files, one per
// page: {"page_id": ..., "title": ..., "text": ..., "url": optional}.
//
// Search ranking: an optional search.json in the same directory maps
// normalised queries to ordered page ids ({"queries": {"q": ["id", ...]}}).
// Other queries are ranked by term overlap (title hits count double, a small
// stop-word list is ignored), ties broken by page id. Pages with no overlap
// are never returned.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "evicheck/retrieval/retrieval.hpp"

namespace evicheck::retrieval {

class FixtureProvider final : public SearchProvider, public ContentProvider {
 public:
  explicit FixtureProvider(const std::filesystem::path& dir);

  std::vector<SearchResult> search(const Query& query, std::size_t k) override;
  RawPage fetch(const std::string& page_id) override;

  std::size_t page_count() const { return pages_.size(); }

 private:
  struct Page {
    RawPage raw;
    std::string url;
  };
  SearchResult result_for(const Page& page, std::size_t rank) const;

  std::map<std::string, Page> pages_;
  std::map<std::string, std::vector<std::string>> pinned_;
};

}  // namespace evicheck::retrieval
