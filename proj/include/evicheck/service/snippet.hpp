#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evicheck/model/types.hpp"

namespace evicheck::service {

inline constexpr std::size_t kDefaultContext = 10;

struct SnippetToken {
  std::string token;
  bool highlighted = false;
  bool visible = false;
  friend bool operator==(const SnippetToken&, const SnippetToken&) = default;
};

using Snippet = std::vector<SnippetToken>;

// visible <=> index < lead, or evidence, or within `context` tokens after an
// evidence token. highlighted <=> evidence. kInvalidInput if the mask does
// not align with the tokens.
Snippet build_snippet(std::span<const std::string> tokens, const model::RationaleMask& mask,
                      std::size_t lead, std::size_t context = kDefaultContext);

// Visible tokens in order, with each maximal hidden run replaced by a single
// placeholder (nullopt).
std::vector<std::optional<std::size_t>> collapse(const Snippet& snippet);

}  // namespace evicheck::service
