#include "evicheck/model/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "evicheck/error.hpp"

namespace evicheck::model {
namespace {

constexpr double kClipNorm = 5.0;
constexpr std::uint64_t kPhase2SeedSalt = 0x9e3779b97f4a7c15ULL;

struct Example {
  EncodedIds ids;
  Label label;
  RationaleMask rationale;  // clipped to the encoded document span
};

// Adam with global-norm clipping.
class Adam {
 public:
  Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> params, std::span<double> grad) {
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    const double clip = norm > kClipNorm ? kClipNorm / norm : 1.0;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i] * clip;
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

void add_tokens(Vocabulary& vocab, std::span<const TrainingInstance> dataset,
                const std::string& wildcard) {
  vocab.add(wildcard);
  for (const auto& inst : dataset) {
    for (const auto& t : inst.claim.tokens()) vocab.add(t);
    for (const auto& t : inst.document.tokens()) vocab.add(t);
  }
}

std::vector<Example> encode_all(std::span<const TrainingInstance> dataset,
                                const Vocabulary& vocab, const ModelConfig& config,
                                bool with_rationale) {
  std::vector<Example> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset) {
    const EncodedInput input = build_input(inst.claim, inst.document, config);
    Example ex{to_ids(input, vocab), inst.gold_label, {}};
    if (with_rationale) {
      std::vector<std::uint8_t> bits(inst.gold_mask.bits().begin(),
                                     inst.gold_mask.bits().begin() +
                                         static_cast<std::ptrdiff_t>(input.doc_span.size()));
      ex.rationale = RationaleMask(std::move(bits));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<double> fit(Encoder& encoder, const std::vector<Example>& examples,
                        const ModelConfig& config, bool with_rationale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Adam adam(encoder.params().size(), config.learning_rate);
  std::vector<double> grad(encoder.params().size(), 0.0);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> history;
  history.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < stop; ++b) {
        const Example& ex = examples[order[b]];
        Supervision sup{ex.label, with_rationale ? &ex.rationale : nullptr, config.lambda};
        epoch_loss += encoder.loss_and_grad(ex.ids, sup, grad).total;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (double& g : grad) g *= inv;
      adam.step(encoder.mutable_params(), grad);
    }
    history.push_back(epoch_loss / static_cast<double>(examples.size()));
  }
  return history;
}

void check_dataset(std::span<const TrainingInstance> dataset) {
  for (const auto& inst : dataset) {
    inst.validate();
    if (inst.claim.empty()) throw Error(ErrorCode::kInvalidInput, "training instance has empty claim");
  }
}

Encoder grown_copy(const Encoder& base, std::size_t new_vocab, std::uint64_t seed) {
  Encoder enc = base;
  std::mt19937_64 rng(seed);
  enc.grow_vocabulary(new_vocab - base.shape().vocab, rng);
  return enc;
}

}  // namespace

Phase1Model::Phase1Model(ModelConfig config, Vocabulary vocab, Encoder encoder,
                         std::vector<double> history)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      encoder_(std::move(encoder)),
      history_(std::move(history)) {
  if (encoder_.shape().vocab != vocab_.size()) {
    throw Error(ErrorCode::kInvalidInput, "encoder and vocabulary sizes disagree");
  }
}

MtlPrediction Phase1Model::infer(const EncodedInput& input) const {
  return encoder_.forward(to_ids(input, vocab_)).prediction;
}

Phase2Model::Phase2Model(ModelConfig config, Vocabulary vocab, Encoder encoder,
                         std::vector<double> history)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      encoder_(std::move(encoder)),
      history_(std::move(history)) {
  if (encoder_.shape().vocab != vocab_.size()) {
    throw Error(ErrorCode::kInvalidInput, "encoder and vocabulary sizes disagree");
  }
}

std::array<double, kNumLabels> Phase2Model::classify(const EncodedInput& input) const {
  return encoder_.forward(to_ids(input, vocab_)).prediction.label_probs;
}

Phase1Model train_phase1(std::span<const TrainingInstance> dataset, const ModelConfig& config) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::kInvalidInput, "phase-1 training set is empty");
  check_dataset(dataset);
  Vocabulary vocab;
  add_tokens(vocab, dataset, config.wildcard);
  Encoder encoder({vocab.size(), config.embedding_dim, config.label_hidden}, config.seed);
  const auto examples = encode_all(dataset, vocab, config, true);
  auto history = fit(encoder, examples, config, true, config.seed);
  return Phase1Model(config, std::move(vocab), std::move(encoder), std::move(history));
}

Phase1Model train_phase1(std::span<const TrainingInstance> dataset, const ModelConfig& config,
                         const Phase1Model& base) {
  config.validate();
  if (dataset.empty()) throw Error(ErrorCode::kInvalidInput, "phase-1 training set is empty");
  check_dataset(dataset);
  Vocabulary vocab = base.vocabulary();
  add_tokens(vocab, dataset, config.wildcard);
  Encoder encoder = grown_copy(base.encoder(), vocab.size(), config.seed);
  const auto examples = encode_all(dataset, vocab, config, true);
  auto history = fit(encoder, examples, config, true, config.seed);
  return Phase1Model(config, std::move(vocab), std::move(encoder), std::move(history));
}

Phase2Model train_phase2(std::span<const TrainingInstance> masked_dataset,
                         const ModelConfig& config) {
  config.validate();
  if (masked_dataset.empty()) {
    throw Error(ErrorCode::kEmptyAfterScreening,
                "no instances survived screening; phase 1 failed to predict any gold label");
  }
  check_dataset(masked_dataset);
  Vocabulary vocab;
  add_tokens(vocab, masked_dataset, config.wildcard);
  const std::uint64_t seed = config.seed ^ kPhase2SeedSalt;
  Encoder encoder({vocab.size(), config.embedding_dim, config.label_hidden}, seed);
  const auto examples = encode_all(masked_dataset, vocab, config, false);
  auto history = fit(encoder, examples, config, false, seed);
  return Phase2Model(config, std::move(vocab), std::move(encoder), std::move(history));
}

Phase2Model train_phase2(std::span<const TrainingInstance> masked_dataset,
                         const ModelConfig& config, const Phase2Model& base) {
  config.validate();
  if (masked_dataset.empty()) {
    throw Error(ErrorCode::kEmptyAfterScreening,
                "no instances survived screening; phase 1 failed to predict any gold label");
  }
  check_dataset(masked_dataset);
  Vocabulary vocab = base.vocabulary();
  add_tokens(vocab, masked_dataset, config.wildcard);
  const std::uint64_t seed = config.seed ^ kPhase2SeedSalt;
  Encoder encoder = grown_copy(base.encoder(), vocab.size(), seed);
  const auto examples = encode_all(masked_dataset, vocab, config, false);
  auto history = fit(encoder, examples, config, false, seed);
  return Phase2Model(config, std::move(vocab), std::move(encoder), std::move(history));
}

std::vector<TrainingInstance> masked_training_set(std::span<const ScreenedInstance> screened,
                                                  const std::string& wildcard) {
  std::vector<TrainingInstance> out;
  out.reserve(screened.size());
  for (const auto& s : screened) {
    TrainingInstance inst = s.instance;
    inst.document = mask_document(s.instance.document, s.predicted_mask, wildcard);
    inst.gold_mask = s.predicted_mask;
    out.push_back(std::move(inst));
  }
  return out;
}

TwoPhaseModel train_two_phase(std::span<const TrainingInstance> dataset, const ModelConfig& config,
                              const TwoPhaseModel* base) {
  Phase1Model phase1 =
      base ? train_phase1(dataset, config, base->phase1) : train_phase1(dataset, config);
  const auto annotations = annotate_rationales(phase1, dataset, config);
  const auto screened = screen_instances(dataset, annotations);
  const auto masked = masked_training_set(screened, config.wildcard);
  Phase2Model phase2 =
      base ? train_phase2(masked, config, base->phase2) : train_phase2(masked, config);
  return TwoPhaseModel{std::move(phase1), std::move(phase2), screened.size(),
                       dataset.size() - screened.size()};
}

}  // namespace evicheck::model
