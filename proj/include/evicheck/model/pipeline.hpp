#pragma once
// Explain-then-predict plumbing: input encoding, rationale binarization,
// screening of phase-1 annotations, wildcard masking and the two-model
// prediction path.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "evicheck/model/types.hpp"

namespace evicheck::model {

// [CLS] claim [SEP] document, dropping document tokens from the right so that
// the sequence plus one reserved closing-separator slot fits config.max_length. The claim is never truncated; a claim
// that alone does not fit is kInvalidInput, as is an empty claim.
EncodedInput build_input(const TokenSequence& claim, const TokenSequence& document,
                         const ModelConfig& config);

// bit = 1 iff prob >= threshold (ties round up).
RationaleMask binarize_mask(std::span<const double> probs, double threshold);

struct Annotation {
  RationaleMask mask;
  Label aux_label = Label::kSupports;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ScreenedInstance {
  TrainingInstance instance;
  RationaleMask predicted_mask;
};

// Keeps exactly the instances whose auxiliary label matches the gold label,
// in input order.
std::vector<ScreenedInstance> screen_instances(std::span<const TrainingInstance> dataset,
                                               std::span<const Annotation> annotations);

// Replaces every token whose mask bit is 0 with the wildcard.
TokenSequence mask_document(const TokenSequence& document, const RationaleMask& mask,
                            const std::string& wildcard);

// Phase-1 behaviour: label distribution plus per-document-token evidence.
class RationaleExtractor {
 public:
  virtual ~RationaleExtractor() = default;
  virtual MtlPrediction infer(const EncodedInput& input) const = 0;
};

// Phase-2 behaviour: label distribution only.
class LabelClassifier {
 public:
  virtual ~LabelClassifier() = default;
  virtual std::array<double, kNumLabels> classify(const EncodedInput& input) const = 0;
};

std::vector<Annotation> annotate_rationales(const RationaleExtractor& model,
                                            std::span<const TrainingInstance> dataset,
                                            const ModelConfig& config);

struct PipelinePrediction {
  Label label = Label::kSupports;
  RationaleMask mask;  // aligned to the document tokens that fit in max_length
  std::array<double, kNumLabels> label_probs{};
  bool truncated = false;
};

PipelinePrediction predict(const TokenSequence& claim, const TokenSequence& document,
                           const RationaleExtractor& phase1, const LabelClassifier& phase2,
                           const ModelConfig& config);

}  // namespace evicheck::model
