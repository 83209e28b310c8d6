#include "evicheck/model/metrics.hpp"

#include "evicheck/error.hpp"

namespace evicheck::model {

double TokenScores::precision() const {
  const std::size_t denom = true_positive + false_positive;
  return denom ? static_cast<double>(true_positive) / static_cast<double>(denom) : 0.0;
}

double TokenScores::recall() const {
  const std::size_t denom = true_positive + false_negative;
  return denom ? static_cast<double>(true_positive) / static_cast<double>(denom) : 0.0;
}

double TokenScores::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

void TokenScores::add(const RationaleMask& predicted, const RationaleMask& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kInvalidInput, "predicted and gold masks differ in length");
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] && gold[i]) ++true_positive;
    else if (predicted[i]) ++false_positive;
    else if (gold[i]) ++false_negative;
  }
}

EvalReport evaluate(const TwoPhaseModel& model, std::span<const TrainingInstance> dataset) {
  EvalReport report;
  report.instances = dataset.size();
  if (dataset.empty()) return report;
  const ModelConfig& config = model.phase1.config();
  const auto annotations = annotate_rationales(model.phase1, dataset, config);
  std::size_t aux_correct = 0, pipeline_correct = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& inst = dataset[i];
    if (annotations[i].aux_label == inst.gold_label) ++aux_correct;
    report.rationale.add(annotations[i].mask, inst.gold_mask);
    if (model.predict(inst.claim, inst.document).label == inst.gold_label) ++pipeline_correct;
  }
  const auto n = static_cast<double>(dataset.size());
  report.phase1_accuracy = static_cast<double>(aux_correct) / n;
  report.pipeline_accuracy = static_cast<double>(pipeline_correct) / n;
  return report;
}

}  // namespace evicheck::model
