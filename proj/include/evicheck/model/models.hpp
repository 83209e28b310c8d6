#pragma once

#include <span>
#include <vector>

#include "evicheck/model/encoder.hpp"
#include "evicheck/model/pipeline.hpp"

namespace evicheck::model {

// Multi-task model: shared encoder, label head and per-token evidence head.
// Immutable after training; infer() is safe to call concurrently.
class Phase1Model final : public RationaleExtractor {
 public:
  Phase1Model(ModelConfig config, Vocabulary vocab, Encoder encoder,
              std::vector<double> history = {});

  MtlPrediction infer(const EncodedInput& input) const override;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const Encoder& encoder() const { return encoder_; }
  // Mean training loss per epoch.
  const std::vector<double>& history() const { return history_; }

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  Encoder encoder_;
  std::vector<double> history_;
};

// Label-only classifier trained on wildcard-masked documents.
class Phase2Model final : public LabelClassifier {
 public:
  Phase2Model(ModelConfig config, Vocabulary vocab, Encoder encoder,
              std::vector<double> history = {});

  std::array<double, kNumLabels> classify(const EncodedInput& input) const override;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const Encoder& encoder() const { return encoder_; }
  const std::vector<double>& history() const { return history_; }

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  Encoder encoder_;
  std::vector<double> history_;
};

// Fits a fresh phase-1 model. Deterministic for a fixed config.seed.
Phase1Model train_phase1(std::span<const TrainingInstance> dataset, const ModelConfig& config);
// Continues training from `base`, extending its vocabulary with unseen tokens.
Phase1Model train_phase1(std::span<const TrainingInstance> dataset, const ModelConfig& config,
                         const Phase1Model& base);

// Throws kEmptyAfterScreening on an empty dataset.
Phase2Model train_phase2(std::span<const TrainingInstance> masked_dataset,
                         const ModelConfig& config);
Phase2Model train_phase2(std::span<const TrainingInstance> masked_dataset,
                         const ModelConfig& config, const Phase2Model& base);

struct TwoPhaseModel {
  Phase1Model phase1;
  Phase2Model phase2;
  std::size_t screened_in = 0;
  std::size_t screened_out = 0;

  PipelinePrediction predict(const TokenSequence& claim, const TokenSequence& document) const {
    return model::predict(claim, document, phase1, phase2, phase1.config());
  }
};

// Phase-2 training set: the screened instances with their documents masked by
// the phase-1 rationale.
std::vector<TrainingInstance> masked_training_set(std::span<const ScreenedInstance> screened,
                                                  const std::string& wildcard);

// annotate -> screen -> mask -> phase 2, optionally warm-started from `base`.
TwoPhaseModel train_two_phase(std::span<const TrainingInstance> dataset, const ModelConfig& config,
                              const TwoPhaseModel* base = nullptr);

}  // namespace evicheck::model
