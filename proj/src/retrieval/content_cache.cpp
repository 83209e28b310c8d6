#include "evicheck/retrieval/content_cache.hpp"

namespace evicheck::retrieval {

ContentCache::ContentCache(ContentProvider& provider, std::chrono::seconds ttl, Clock clock)
    : provider_(provider), ttl_(ttl), clock_(std::move(clock)) {}

std::shared_ptr<const DocumentContent> ContentCache::get(const SearchResult& result) {
  std::promise<std::shared_ptr<const DocumentContent>> promise;
  std::shared_future<std::shared_ptr<const DocumentContent>> future;
  std::size_t generation = 0;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    const auto now = clock_();
    auto it = entries_.find(result.page_id);
    if (it != entries_.end() && now - it->second.loaded_at < ttl_) {
      future = it->second.content;
    } else {
      future = promise.get_future().share();
      generation = ++fetches_;
      entries_[result.page_id] = Entry{future, now, generation};
      owner = true;
    }
  }
  if (owner) {
    try {
      promise.set_value(std::make_shared<const DocumentContent>(fetch_content(result, provider_)));
    } catch (...) {
      promise.set_exception(std::current_exception());
      // Failures are not cached.
      std::lock_guard lock(mu_);
      auto it = entries_.find(result.page_id);
      if (it != entries_.end() && it->second.generation == generation) entries_.erase(it);
    }
  }
  return future.get();
}

std::size_t ContentCache::provider_fetches() const {
  std::lock_guard lock(mu_);
  return fetches_;
}

}  // namespace evicheck::retrieval
