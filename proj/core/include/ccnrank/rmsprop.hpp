#pragma once

#include <map>
#include <string>

#include "ccnrank/parameters.hpp"

namespace ccnrank {

struct RmsPropState {
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-6;
  // Running mean of squared gradients, created lazily per parameter.
  std::map<std::string, Tensor> accumulators;
};

/// acc <- rho*acc + (1-rho)*g^2; theta <- theta - lr*g/sqrt(acc+eps).
/// Frozen parameters are skipped. All gradients are zeroed afterwards.
void rmsprop_step(ParameterSet& params, RmsPropState& state);

}  // namespace ccnrank
