#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evicheck::model {

inline constexpr std::string_view kClsMarker = "[CLS]";
inline constexpr std::string_view kSepMarker = "[SEP]";

enum class Label : std::uint8_t { kSupports = 0, kRefutes = 1 };
inline constexpr std::size_t kNumLabels = 2;

std::string_view label_name(Label label);
// Accepts "SUPPORTS" / "REFUTES"; throws kInvalidInput otherwise.
Label parse_label(std::string_view name);

bool is_reserved_token(std::string_view token);

// Lowercased word tokenizer shared by training data, retrieval windows and
// the feedback export so that masks always align. Words keep internal
// hyphens and apostrophes; every other punctuation character is its own
// token.
std::vector<std::string> tokenize(std::string_view text);

// Ordered tokens with no reserved markers.
class TokenSequence {
 public:
  TokenSequence() = default;
  explicit TokenSequence(std::vector<std::string> tokens);
  static TokenSequence from_text(std::string_view text);

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  std::string joined() const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<std::string> tokens_;
};

// One bit per document token; 1 marks an evidence token.
class RationaleMask {
 public:
  RationaleMask() = default;
  explicit RationaleMask(std::vector<std::uint8_t> bits);
  static RationaleMask zeros(std::size_t n) { return RationaleMask(std::vector<std::uint8_t>(n, 0)); }

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::size_t count_ones() const;

  friend bool operator==(const RationaleMask&, const RationaleMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct EncodedInput {
  std::vector<std::string> tokens;  // [CLS] claim [SEP] document
  Span claim_span;
  Span doc_span;
  bool truncated = false;
};

struct MtlPrediction {
  std::array<double, kNumLabels> label_probs{};
  std::vector<double> evidence_probs;  // one per (possibly truncated) document token
};

Label argmax_label(const std::array<double, kNumLabels>& probs);

struct TrainingInstance {
  TokenSequence claim;
  TokenSequence document;
  Label gold_label = Label::kSupports;
  RationaleMask gold_mask;

  // Throws kInvalidInput when gold_mask and document lengths differ.
  void validate() const;
};

struct ModelConfig {
  std::size_t max_length = 512;
  double lambda = 1.0;
  double evidence_threshold = 0.5;
  std::string wildcard = ".";

  std::size_t embedding_dim = 24;
  std::size_t label_hidden = 16;

  std::size_t epochs = 20;
  double learning_rate = 0.01;
  std::size_t batch_size = 8;
  std::uint64_t seed = 13;

  // Throws kInvalidConfig on violation.
  void validate() const;
};

}  // namespace evicheck::model
