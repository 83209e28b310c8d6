#pragma once
// Desk-scale shared encoder for the explain-then-predict models.
//
// Per token:      x_i = E[tok_i] + S[segment_i]
//                 h_i = tanh(W0 x_i + Wl x_{i-1} + Wr x_{i+1} + b_h)
// Claim summary:  s   = mean of h_i over claim tokens
// Doc tokens:     r_i = [h_i ; h_i * s]
// Evidence head:  p_i = sigmoid(w_ev . r_i + b_ev)
// Label head:     q = Wq h_cls + b_q, alpha = softmax(q . r_i / sqrt(2d)),
//                 c = sum alpha_i r_i, m = tanh(V [c ; s] + v),
//                 label_probs = softmax(U m + u)
//
// All parameters live in one flat buffer so optimisers, checkpoints and the
// finite-difference checks can treat them uniformly.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evicheck/model/losses.hpp"
#include "evicheck/model/types.hpp"

namespace evicheck::model {

class Vocabulary {
 public:
  static constexpr std::int32_t kUnk = 0;
  static constexpr std::int32_t kCls = 1;
  static constexpr std::int32_t kSep = 2;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);  // must start with the three specials

  // Returns the id, adding the token when new.
  std::int32_t add(const std::string& token);
  std::int32_t lookup(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

enum class Segment : std::uint8_t { kCls = 0, kClaim = 1, kSep = 2, kDoc = 3 };
inline constexpr std::size_t kNumSegments = 4;

struct EncodedIds {
  std::vector<std::int32_t> ids;
  std::vector<Segment> segments;
  Span claim_span;
  Span doc_span;
};

EncodedIds to_ids(const EncodedInput& input, const Vocabulary& vocab);

struct EncoderShape {
  std::size_t vocab = 0;
  std::size_t dim = 0;
  std::size_t hidden = 0;
  friend bool operator==(const EncoderShape&, const EncoderShape&) = default;
};

struct ParamLayout {
  explicit ParamLayout(EncoderShape shape);

  EncoderShape shape;
  std::size_t embed, segment, w0, wl, wr, bh, w_ev, b_ev, wq, bq, v, bv, u, bu, total;
};

struct ForwardResult {
  MtlPrediction prediction;
  std::vector<double> evidence_logits;
};

struct Supervision {
  Label label = Label::kSupports;
  const RationaleMask* rationale = nullptr;  // nullptr: label loss only
  double lambda = 0.0;
};

class Encoder {
 public:
  Encoder() = default;
  Encoder(EncoderShape shape, std::uint64_t seed);
  Encoder(EncoderShape shape, std::vector<double> params);

  const EncoderShape& shape() const { return layout_.shape; }
  const ParamLayout& layout() const { return layout_; }
  std::span<const double> params() const { return params_; }
  std::span<double> mutable_params() { return params_; }

  ForwardResult forward(const EncodedIds& input) const;

  // Loss for one example; gradients are added into grad (same layout as
  // params). The evidence term is included only when sup.rationale is set.
  LossBreakdown loss_and_grad(const EncodedIds& input, const Supervision& sup,
                              std::span<double> grad) const;

  // Appends `count` embedding rows initialised from rng.
  void grow_vocabulary(std::size_t count, std::mt19937_64& rng);

 private:
  struct Cache;
  void run_forward(const EncodedIds& input, Cache& cache) const;

  ParamLayout layout_{EncoderShape{}};
  std::vector<double> params_;
};

}  // namespace evicheck::model
