#include "evicheck/model/losses.hpp"

#include <algorithm>
#include <cmath>

#include "evicheck/error.hpp"

namespace evicheck::model {
namespace {

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

void check_lengths(std::size_t probs, std::size_t gold) {
  if (probs != gold) {
    throw Error(ErrorCode::kInvalidInput, "evidence probabilities (" + std::to_string(probs) +
                                              ") and gold mask (" + std::to_string(gold) +
                                              ") differ in length");
  }
}

}  // namespace

double explanation_loss(std::span<const double> evidence_probs, const RationaleMask& gold) {
  check_lengths(evidence_probs.size(), gold.size());
  double sum0 = 0.0, sum1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double p = clamp_prob(evidence_probs[i]);
    if (gold[i]) {
      sum1 -= std::log(p);
      ++n1;
    } else {
      sum0 -= std::log1p(-p);
      ++n0;
    }
  }
  double loss = 0.0;
  if (n0) loss += sum0 / static_cast<double>(n0);
  if (n1) loss += sum1 / static_cast<double>(n1);
  return loss;
}

double explanation_loss(const MtlPrediction& pred, const RationaleMask& gold) {
  return explanation_loss(pred.evidence_probs, gold);
}

void explanation_loss_logit_grad(std::span<const double> evidence_probs, const RationaleMask& gold,
                                 std::span<double> grad_out) {
  check_lengths(evidence_probs.size(), gold.size());
  check_lengths(grad_out.size(), gold.size());
  const std::size_t n1 = gold.count_ones();
  const std::size_t n0 = gold.size() - n1;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double p = evidence_probs[i];
    if (p < kProbFloor || p > 1.0 - kProbFloor) {
      grad_out[i] = 0.0;
    } else if (gold[i]) {
      grad_out[i] = (p - 1.0) / static_cast<double>(n1);
    } else {
      grad_out[i] = p / static_cast<double>(n0);
    }
  }
}

double task_loss(const std::array<double, kNumLabels>& label_probs, Label gold) {
  return -std::log(clamp_prob(label_probs[static_cast<std::size_t>(gold)]));
}

LossBreakdown total_loss(double task, double exp, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "lambda must be non-negative");
  if (!(task >= 0.0) || !(exp >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "losses must be non-negative");
  }
  return LossBreakdown{task, exp, lambda, task + lambda * exp};
}

}  // namespace evicheck::model
