#pragma once

#include <span>

#include "evicheck/model/models.hpp"

namespace evicheck::model {

struct TokenScores {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  void add(const RationaleMask& predicted, const RationaleMask& gold);
};

struct EvalReport {
  std::size_t instances = 0;
  double phase1_accuracy = 0.0;    // auxiliary label head
  double pipeline_accuracy = 0.0;  // phase 2 on masked documents
  TokenScores rationale;           // micro-averaged over all document tokens
};

EvalReport evaluate(const TwoPhaseModel& model, std::span<const TrainingInstance> dataset);

}  // namespace evicheck::model
