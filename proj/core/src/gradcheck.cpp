#include "ccnrank/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ccnrank/random.hpp"

namespace ccnrank {
namespace {

double evaluate(const LossBuilder& loss, ParameterSet& params) {
  Graph g;
  return g.value(loss(g, params)).item();
}

std::vector<std::size_t> sample_coordinates(std::size_t n, std::size_t want,
                                            Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n <= want) return idx;
  rng.shuffle(idx);
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GradCheckReport finite_diff_check(const LossBuilder& loss, ParameterSet& params,
                                  const GradCheckOptions& options) {
  params.zero_grad();
  {
    Graph g;
    g.backward(loss(g, params));
  }

  GradCheckReport report;
  Rng rng(options.seed);
  for (const std::string& name : params.names()) {
    const Tensor analytic = params.grad(name);
    Tensor& theta = params.value(name);
    for (std::size_t i :
         sample_coordinates(theta.size(), options.samples_per_parameter, rng)) {
      const double saved = theta[i];
      theta[i] = saved + options.h;
      const double plus = evaluate(loss, params);
      theta[i] = saved - options.h;
      const double minus = evaluate(loss, params);
      theta[i] = saved;

      const double numeric = (plus - minus) / (2.0 * options.h);
      const double a = analytic[i] * options.analytic_scale;
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++report.coordinates_checked;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = std::max(rel, report.max_relative_error);
        report.worst_parameter = name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  params.zero_grad();
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace ccnrank
