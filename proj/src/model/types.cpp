#include "evicheck/model/types.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "evicheck/error.hpp"

namespace evicheck::model {

std::string_view label_name(Label label) {
  return label == Label::kSupports ? "SUPPORTS" : "REFUTES";
}

Label parse_label(std::string_view name) {
  if (name == "SUPPORTS") return Label::kSupports;
  if (name == "REFUTES") return Label::kRefutes;
  throw Error(ErrorCode::kInvalidInput, "unknown label '" + std::string(name) + "'");
}

bool is_reserved_token(std::string_view token) {
  return token == kClsMarker || token == kSepMarker;
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      out.emplace_back(1, static_cast<char>(c));
      ++i;
      continue;
    }
    std::string word;
    while (i < n) {
      const auto ch = static_cast<unsigned char>(text[i]);
      if (is_word_char(ch)) {
        word.push_back(static_cast<char>(std::tolower(ch)));
        ++i;
      } else if ((ch == '-' || ch == '\'') && i + 1 < n &&
                 is_word_char(static_cast<unsigned char>(text[i + 1]))) {
        word.push_back(static_cast<char>(ch));
        ++i;
      } else {
        break;
      }
    }
    out.push_back(std::move(word));
  }
  return out;
}

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (is_reserved_token(t)) {
      throw Error(ErrorCode::kInvalidInput, "token sequence contains reserved marker " + t);
    }
    if (t.empty()) throw Error(ErrorCode::kInvalidInput, "token sequence contains an empty token");
  }
}

TokenSequence TokenSequence::from_text(std::string_view text) {
  return TokenSequence(tokenize(text));
}

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens_[i];
  }
  return out;
}

RationaleMask::RationaleMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorCode::kInvalidInput, "rationale mask bits must be 0 or 1");
  }
}

std::size_t RationaleMask::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Label argmax_label(const std::array<double, kNumLabels>& probs) {
  // Ties go to SUPPORTS.
  return probs[1] > probs[0] ? Label::kRefutes : Label::kSupports;
}

void TrainingInstance::validate() const {
  if (gold_mask.size() != document.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "gold mask length " + std::to_string(gold_mask.size()) +
                    " does not match document length " + std::to_string(document.size()));
  }
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (max_length < 4) fail("max_length must be at least 4");
  if (!(lambda >= 0.0)) fail("lambda must be non-negative");
  if (!(evidence_threshold > 0.0 && evidence_threshold < 1.0)) {
    fail("evidence_threshold must lie strictly between 0 and 1");
  }
  if (tokenize(wildcard).size() != 1 || tokenize(wildcard)[0] != wildcard) {
    fail("wildcard must be exactly one token");
  }
  if (embedding_dim == 0 || label_hidden == 0) fail("encoder sizes must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
}

}  // namespace evicheck::model
