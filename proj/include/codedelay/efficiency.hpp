#pragma once

#include "codedelay/kernel.hpp"

namespace codedelay {

struct EfficiencyResult {
  double expected_received = 0.0;  // E[M_k], packets per generation
  double eta = 0.0;                // k / E[M_k]
};

/// Expected packets received in one round that moves the chain from state i to state j.
double received_on_transition(const TransitionKernel& kernel, int i, int j);

/// E[M_k]: packets received until a generation of size k is decoded.
double expected_received(const TransitionKernel& kernel);

EfficiencyResult efficiency(const TransitionKernel& kernel);

}  // namespace codedelay
