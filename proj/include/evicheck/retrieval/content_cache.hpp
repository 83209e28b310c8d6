#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "evicheck/retrieval/retrieval.hpp"

namespace evicheck::retrieval {

// Caches segmented content by page id so repeated windows over one page see
// the same sentences. Concurrent requests for a page share one fetch.
class ContentCache {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  ContentCache(ContentProvider& provider, std::chrono::seconds ttl,
               Clock clock = [] { return std::chrono::system_clock::now(); });

  std::shared_ptr<const DocumentContent> get(const SearchResult& result);

  std::size_t provider_fetches() const;

 private:
  struct Entry {
    std::shared_future<std::shared_ptr<const DocumentContent>> content;
    std::chrono::system_clock::time_point loaded_at;
    std::size_t generation = 0;
  };

  ContentProvider& provider_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
  std::size_t fetches_ = 0;
};

}  // namespace evicheck::retrieval
