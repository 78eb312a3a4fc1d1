#include "ccnrank/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ccnrank/errors.hpp"
#include "ccnrank/evaluation.hpp"
#include "ccnrank/ops.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/rmsprop.hpp"

namespace ccnrank {
namespace {

void clip_gradients(ParameterSet& params, double max_norm) {
  double sq = 0.0;
  for (const auto& name : params.names())
    for (double g : params.grad(name).data()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double factor = max_norm / norm;
  for (const auto& name : params.names())
    for (double& g : params.grad(name).data()) g *= factor;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
}

double squared_error(double p, int label) noexcept {
  const double d = p - static_cast<double>(label);
  return d * d;
}

Var squared_error(Graph& g, Var p, int label) {
  Var diff = ops::sub(g, p, g.constant(Tensor::scalar(static_cast<double>(label))));
  return ops::mul(g, diff, diff);
}

Var batch_loss(Graph& g, Model& model, std::span<const PairFeatures> inputs,
               std::span<const int> labels) {
  if (inputs.empty() || inputs.size() != labels.size()) {
    throw ContractError("batch_loss: need a non-empty batch with one label per input");
  }
  std::vector<Var> losses;
  losses.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    losses.push_back(squared_error(g, model.forward(g, inputs[i]), labels[i]));
  }
  return ops::scale(g, ops::sum(g, ops::stack(g, losses)),
                    1.0 / static_cast<double>(inputs.size()));
}

ValidationMetrics validate_model(const Model& model, const Featurizer& featurizer,
                                 const std::vector<EvalInstance>& validation) {
  if (validation.empty()) throw ContractError("validation set is empty");
  std::size_t correct = 0;
  std::vector<std::size_t> ranks;
  ranks.reserve(validation.size());
  std::array<double, kCandidatesPerInstance> scores{};
  for (const auto& x : validation) {
    for (std::size_t i = 0; i < kCandidatesPerInstance; ++i) {
      scores[i] = model.predict(featurizer(x.context, x.candidates[i]));
    }
    correct += scores[0] > 0.5 ? 1 : 0;
    correct += scores[1] > 0.5 ? 0 : 1;
    ranks.push_back(rank_candidates(scores));
  }
  ValidationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(2 * validation.size());
  m.recall1 = recall_at_k(ranks, 1);
  return m;
}

std::vector<std::span<const std::size_t>> epoch_batches(std::vector<std::size_t>& order,
                                                        std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  rng.shuffle(order);
  std::vector<std::span<const std::size_t>> batches;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t len = std::min(batch_size, order.size() - begin);
    batches.emplace_back(order.data() + begin, len);
  }
  return batches;
}

TrainResult train(Model model, const std::vector<TrainInstance>& train_set,
                  const std::vector<EvalInstance>& validation,
                  const Featurizer& featurizer, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ContractError("training set is empty");
  if (validation.empty()) throw ContractError("validation set is empty");
  if (featurizer.vocabulary().size() != model.vocabulary_size()) {
    throw ContractError("featurizer vocabulary size does not match the model");
  }

  std::vector<PairFeatures> features;
  features.reserve(train_set.size());
  for (const auto& x : train_set) features.push_back(featurizer(x.context, x.response));

  RmsPropState optimizer;
  optimizer.learning_rate = config.learning_rate;
  optimizer.rho = config.rho;
  optimizer.epsilon = config.epsilon;
  ParameterSet& params = model.parameters();
  params.zero_grad();

  Rng rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{model, 0, {}};
  double best_accuracy = -1.0;
  std::size_t since_improvement = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto batches = epoch_batches(order, config.batch_size, rng);
    double loss_sum = 0.0;
    for (std::size_t batch_index = 0; batch_index < batches.size(); ++batch_index) {
      const auto batch = batches[batch_index];
      const double inv = 1.0 / static_cast<double>(batch.size());
      double batch_sum = 0.0;
      // One graph per instance keeps memory flat; gradients accumulate in
      // the parameter slots, scaled so the batch gradient is the mean.
      for (const std::size_t idx : batch) {
        Graph g;
        Var loss = squared_error(g, model.forward(g, features[idx]), train_set[idx].label);
        const double value = g.value(loss).item();
        if (!std::isfinite(value)) {
          throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch_index));
        }
        batch_sum += value;
        g.backward(ops::scale(g, loss, inv));
      }
      if (config.clip_norm > 0.0) clip_gradients(params, config.clip_norm);
      rmsprop_step(params, optimizer);
      loss_sum += batch_sum;
    }

    const ValidationMetrics metrics = validate_model(model, featurizer, validation);
    EpochReport report;
    report.epoch = epoch;
    report.mean_loss = loss_sum / static_cast<double>(order.size());
    report.validation_accuracy = metrics.accuracy;
    report.validation_recall1 = metrics.recall1;
    if (config.record_wall_clock) {
      report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    result.reports.push_back(report);
    if (on_epoch) on_epoch(report);

    if (metrics.accuracy > best_accuracy) {
      best_accuracy = metrics.accuracy;
      result.best.parameters().assign_values(params);
      result.best_epoch = epoch;
      since_improvement = 0;
    } else if (++since_improvement >= config.patience) {
      break;
    }
  }
  return result;
}

void write_epoch_log_header(std::ostream& out) {
  out << "epoch\tloss\tval_acc\tval_recall1\tseconds\n";
}

void write_epoch_log_line(std::ostream& out, const EpochReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\t%.17g\t%.3f\n", r.epoch, r.mean_loss,
                r.validation_accuracy, r.validation_recall1, r.seconds);
  out << buf;
}

}  // namespace ccnrank
