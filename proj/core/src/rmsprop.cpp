#include "ccnrank/rmsprop.hpp"

#include <cmath>

namespace ccnrank {

void rmsprop_step(ParameterSet& params, RmsPropState& state) {
  for (const std::string& name : params.names()) {
    if (!params.trainable(name)) continue;
    Tensor& theta = params.value(name);
    const Tensor& g = params.grad(name);
    auto [it, inserted] =
        state.accumulators.try_emplace(name, Tensor::zeros_like(theta));
    Tensor& acc = it->second;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = g[i];
      acc[i] = state.rho * acc[i] + (1.0 - state.rho) * gi * gi;
      theta[i] -= state.learning_rate * gi / std::sqrt(acc[i] + state.epsilon);
    }
  }
  params.zero_grad();
}

}  // namespace ccnrank
