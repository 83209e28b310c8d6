#pragma once
// Central finite differences over the encoder's loss, computed only from the
// forward pass and the standalone loss functions. Kept separate from the
// analytic backward pass it is used to check.

#include <cmath>
#include <vector>

#include "evicheck/model/encoder.hpp"
#include "evicheck/model/losses.hpp"

namespace evicheck::testing {

inline double forward_loss(const model::Encoder& enc, const model::EncodedIds& ids,
                           const model::Supervision& sup) {
  const auto out = enc.forward(ids);
  double loss = model::task_loss(out.prediction.label_probs, sup.label);
  if (sup.rationale) {
    loss += sup.lambda * model::explanation_loss(out.prediction.evidence_probs, *sup.rationale);
  }
  return loss;
}

inline double central_difference(model::Encoder& enc, const model::EncodedIds& ids,
                                 const model::Supervision& sup, std::size_t coord,
                                 double step = 1e-5) {
  auto params = enc.mutable_params();
  const double saved = params[coord];
  params[coord] = saved + step;
  const double up = forward_loss(enc, ids, sup);
  params[coord] = saved - step;
  const double down = forward_loss(enc, ids, sup);
  params[coord] = saved;
  return (up - down) / (2.0 * step);
}

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

}  // namespace evicheck::testing
