#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evicheck::retrieval {

// Removes wiki markup: {{templates}}, <ref>..</ref> and other tags, bold and
// italic quotes, [[target|label]] links (keeping the label) and "== heading =="
// lines (which become paragraph breaks).
std::string strip_markup(std::string_view text);

// Rule-based splitter. A sentence ends at '.', '!' or '?' (plus any closing
// quotes or brackets) when followed by whitespace and then an uppercase
// letter or a digit. Line breaks always end a sentence. Blank sentences are
// dropped. Abbreviations such as "Dr. Smith" are split; that is accepted.
std::vector<std::string> segment_sentences(std::string_view text);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

}  // namespace evicheck::retrieval
