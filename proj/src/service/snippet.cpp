#include "evicheck/service/snippet.hpp"

#include "evicheck/error.hpp"

namespace evicheck::service {

Snippet build_snippet(std::span<const std::string> tokens, const model::RationaleMask& mask,
                      std::size_t lead, std::size_t context) {
  if (tokens.size() != mask.size()) {
    throw Error(ErrorCode::kInvalidInput, "snippet mask does not align with the window tokens");
  }
  Snippet out(tokens.size());
  std::size_t visible_until = 0;  // exclusive bound from the last evidence token
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool evidence = mask[i] == 1;
    if (evidence) visible_until = i + 1 + context;
    out[i] = SnippetToken{tokens[i], evidence, i < lead || evidence || i < visible_until};
  }
  return out;
}

std::vector<std::optional<std::size_t>> collapse(const Snippet& snippet) {
  std::vector<std::optional<std::size_t>> out;
  for (std::size_t i = 0; i < snippet.size(); ++i) {
    if (snippet[i].visible) {
      out.emplace_back(i);
    } else if (out.empty() || out.back().has_value()) {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace evicheck::service
