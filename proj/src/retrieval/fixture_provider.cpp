#include "evicheck/retrieval/fixture_provider.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "evicheck/error.hpp"
#include "evicheck/model/types.hpp"

namespace evicheck::retrieval {
namespace {

using nlohmann::json;

const std::set<std::string> kStopWords = {"a",  "an", "the", "is", "are", "was", "were", "of",
                                          "in", "on", "to",  "and", "or", "by", "for", "with",
                                          "at", "as", "it",  "be"};

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read fixture " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, "bad fixture " + path.string() + ": " + e.what());
  }
}

std::set<std::string> terms(const std::string& text) {
  std::set<std::string> out;
  for (auto& t : model::tokenize(text)) {
    if (!kStopWords.count(t) && std::isalnum(static_cast<unsigned char>(t[0]))) out.insert(t);
  }
  return out;
}

}  // namespace

FixtureProvider::FixtureProvider(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kInvalidConfig, "fixture directory " + dir.string() + " not found");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const json j = read_json(file);
    if (file.filename() == "search.json") {
      for (const auto& [q, ids] : j.at("queries").items()) {
        pinned_[q] = ids.get<std::vector<std::string>>();
      }
      continue;
    }
    if (!j.contains("page_id")) continue;
    Page page;
    page.raw.page_id = j.at("page_id").get<std::string>();
    page.raw.title = j.value("title", page.raw.page_id);
    page.raw.text = j.value("text", "");
    page.url = j.value("url", "fixture://" + page.raw.page_id);
    pages_.emplace(page.raw.page_id, std::move(page));
  }
}

SearchResult FixtureProvider::result_for(const Page& page, std::size_t rank) const {
  return SearchResult{rank, page.raw.title, page.url, page.raw.page_id};
}

std::vector<SearchResult> FixtureProvider::search(const Query& query, std::size_t k) {
  std::vector<SearchResult> out;
  if (auto it = pinned_.find(query.normalized); it != pinned_.end()) {
    for (const auto& id : it->second) {
      if (out.size() == k) break;
      auto page = pages_.find(id);
      if (page != pages_.end()) out.push_back(result_for(page->second, out.size() + 1));
    }
    return out;
  }

  const auto wanted = terms(query.normalized);
  std::vector<std::pair<int, const Page*>> scored;
  for (const auto& [id, page] : pages_) {
    const auto title_terms = terms(page.raw.title);
    const auto text_terms = terms(page.raw.text);
    int score = 0;
    for (const auto& t : wanted) {
      if (title_terms.count(t)) score += 2;
      if (text_terms.count(t)) score += 1;
    }
    if (score > 0) scored.emplace_back(score, &page);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [score, page] : scored) {
    if (out.size() == k) break;
    out.push_back(result_for(*page, out.size() + 1));
  }
  return out;
}

RawPage FixtureProvider::fetch(const std::string& page_id) {
  auto it = pages_.find(page_id);
  if (it == pages_.end()) {
    throw Error(ErrorCode::kContentNotFound, "no fixture page '" + page_id + "'");
  }
  return it->second.raw;
}

}  // namespace evicheck::retrieval
