#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ccnrank/autodiff.hpp"

namespace ccnrank {

struct GradCheckOptions {
  double h = 1e-5;
  double tolerance = 1e-4;
  // Coordinates compared per parameter; all of them when the tensor is smaller.
  std::size_t samples_per_parameter = 32;
  std::uint64_t seed = 0;
  // Multiplies the analytic gradient before comparison. Only useful for
  // checking that the checker itself catches a wrong gradient.
  double analytic_scale = 1.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
  bool passed = true;
};

// Builds the scalar loss on a fresh graph using parameters from `params`.
using LossBuilder = std::function<Var(Graph&, ParameterSet&)>;

/// Compares analytic gradients against central differences
/// (L(t+h) - L(t-h)) / 2h on sampled coordinates of every parameter.
/// Relative error is |a-b| / max(|a|, |b|, 1e-8). Parameter values are
/// restored and gradients zeroed on return.
GradCheckReport finite_diff_check(const LossBuilder& loss, ParameterSet& params,
                                  const GradCheckOptions& options = {});

}  // namespace ccnrank
