#pragma once

#include <array>
#include <span>

#include "evicheck/model/types.hpp"

namespace evicheck::model {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-7;

struct LossBreakdown {
  double task_loss = 0.0;
  double exp_loss = 0.0;
  double lambda = 0.0;
  double total = 0.0;
};

// Class-balanced rationale loss: the summed BCE over non-evidence tokens is
// divided by their count, likewise for evidence tokens, and the two terms
// are added. A class with no tokens contributes 0.
double explanation_loss(std::span<const double> evidence_probs, const RationaleMask& gold);
double explanation_loss(const MtlPrediction& pred, const RationaleMask& gold);

// d explanation_loss / d logit_i, for evidence_probs = sigmoid(logits).
// Zero where the probability was clamped.
void explanation_loss_logit_grad(std::span<const double> evidence_probs, const RationaleMask& gold,
                                 std::span<double> grad_out);

// -ln p(gold) with the same clamp.
double task_loss(const std::array<double, kNumLabels>& label_probs, Label gold);

// total = task_loss + lambda * exp_loss. Negative lambda is kInvalidConfig,
// negative losses kInvalidInput.
LossBreakdown total_loss(double task_loss, double exp_loss, double lambda);

}  // namespace evicheck::model
