#include "evicheck/model/pipeline.hpp"

#include <algorithm>

#include "evicheck/error.hpp"
#include "evicheck/simd/kernels.hpp"

namespace evicheck::model {

EncodedInput build_input(const TokenSequence& claim, const TokenSequence& document,
                         const ModelConfig& config) {
  if (claim.empty()) throw Error(ErrorCode::kInvalidInput, "claim is empty");
  const std::size_t fixed = claim.size() + 2;
  // One slot stays reserved for a closing separator so the budget matches
  // BERT-style [CLS] a [SEP] b [SEP] inputs; the marker itself is not emitted.
  if (fixed + 1 > config.max_length) {
    throw Error(ErrorCode::kInvalidInput, "claim of " + std::to_string(claim.size()) +
                                              " tokens does not fit max_length " +
                                              std::to_string(config.max_length));
  }
  const std::size_t doc_room = config.max_length - fixed - 1;
  const std::size_t doc_len = std::min(document.size(), doc_room);

  EncodedInput out;
  out.tokens.reserve(fixed + doc_len);
  out.tokens.emplace_back(kClsMarker);
  out.tokens.insert(out.tokens.end(), claim.tokens().begin(), claim.tokens().end());
  out.tokens.emplace_back(kSepMarker);
  out.tokens.insert(out.tokens.end(), document.tokens().begin(),
                    document.tokens().begin() + static_cast<std::ptrdiff_t>(doc_len));
  out.claim_span = {1, 1 + claim.size()};
  out.doc_span = {fixed, fixed + doc_len};
  out.truncated = doc_len < document.size();
  return out;
}

RationaleMask binarize_mask(std::span<const double> probs, double threshold) {
  std::vector<std::uint8_t> bits(probs.size());
  simd::threshold(probs, threshold, bits);
  return RationaleMask(std::move(bits));
}

std::vector<ScreenedInstance> screen_instances(std::span<const TrainingInstance> dataset,
                                               std::span<const Annotation> annotations) {
  if (dataset.size() != annotations.size()) {
    throw Error(ErrorCode::kInvalidInput, "dataset and annotations are not aligned (" +
                                              std::to_string(dataset.size()) + " vs " +
                                              std::to_string(annotations.size()) + ")");
  }
  std::vector<ScreenedInstance> kept;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (annotations[i].aux_label == dataset[i].gold_label) {
      kept.push_back({dataset[i], annotations[i].mask});
    }
  }
  return kept;
}

TokenSequence mask_document(const TokenSequence& document, const RationaleMask& mask,
                            const std::string& wildcard) {
  if (document.size() != mask.size()) {
    throw Error(ErrorCode::kInvalidInput, "mask length " + std::to_string(mask.size()) +
                                              " does not match document length " +
                                              std::to_string(document.size()));
  }
  std::vector<std::string> out;
  out.reserve(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) {
    out.push_back(mask[i] ? document[i] : wildcard);
  }
  return TokenSequence(std::move(out));
}

std::vector<Annotation> annotate_rationales(const RationaleExtractor& model,
                                            std::span<const TrainingInstance> dataset,
                                            const ModelConfig& config) {
  std::vector<Annotation> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset) {
    const EncodedInput input = build_input(inst.claim, inst.document, config);
    const MtlPrediction pred = model.infer(input);
    // Tokens dropped by truncation count as non-evidence so the mask stays
    // aligned with the full document.
    std::vector<std::uint8_t> bits =
        binarize_mask(pred.evidence_probs, config.evidence_threshold).bits();
    bits.resize(inst.document.size(), 0);
    out.push_back({RationaleMask(std::move(bits)), argmax_label(pred.label_probs)});
  }
  return out;
}

PipelinePrediction predict(const TokenSequence& claim, const TokenSequence& document,
                           const RationaleExtractor& phase1, const LabelClassifier& phase2,
                           const ModelConfig& config) {
  const EncodedInput input = build_input(claim, document, config);
  const MtlPrediction explained = phase1.infer(input);
  if (explained.evidence_probs.size() != input.doc_span.size()) {
    throw Error(ErrorCode::kInvalidInput, "phase-1 evidence does not cover the document window");
  }

  PipelinePrediction out;
  out.mask = binarize_mask(explained.evidence_probs, config.evidence_threshold);
  out.truncated = input.truncated;

  std::vector<std::string> kept(document.tokens().begin(),
                                document.tokens().begin() +
                                    static_cast<std::ptrdiff_t>(input.doc_span.size()));
  const TokenSequence masked = mask_document(TokenSequence(std::move(kept)), out.mask,
                                             config.wildcard);
  out.label_probs = phase2.classify(build_input(claim, masked, config));
  out.label = argmax_label(out.label_probs);
  return out;
}

}  // namespace evicheck::model
