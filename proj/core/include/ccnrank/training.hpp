#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ccnrank/autodiff.hpp"
#include "ccnrank/corpus.hpp"
#include "ccnrank/models.hpp"
#include "ccnrank/random.hpp"

namespace ccnrank {

struct TrainConfig {
  std::size_t batch_size = 256;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-6;
  std::size_t max_epochs = 10;
  std::size_t patience = 2;
  std::uint64_t seed = 0;
  // Global gradient-norm clip; 0 disables it.
  double clip_norm = 0.0;
  // When false, EpochReport::seconds is recorded as 0 so that run logs are
  // byte-reproducible.
  bool record_wall_clock = true;

  void validate() const;  // throws ConfigError
};

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double validation_accuracy = 0.0;
  double validation_recall1 = 0.0;
  double seconds = 0.0;

  friend bool operator==(const EpochReport&, const EpochReport&) = default;
};

struct TrainResult {
  Model best;
  std::size_t best_epoch = 0;
  std::vector<EpochReport> reports;
};

// (p - y)^2
double squared_error(double p, int label) noexcept;
Var squared_error(Graph& g, Var p, int label);

/// Mean squared error of a batch recorded on one graph.
Var batch_loss(Graph& g, Model& model, std::span<const PairFeatures> inputs,
               std::span<const int> labels);

struct ValidationMetrics {
  double accuracy = 0.0;  // ground truth vs first distractor, threshold 0.5
  double recall1 = 0.0;
};

ValidationMetrics validate_model(const Model& model, const Featurizer& featurizer,
                                 const std::vector<EvalInstance>& validation);

/// Shuffles `order` in place and cuts it into consecutive batches of
/// `batch_size` (the last one may be shorter).
std::vector<std::span<const std::size_t>> epoch_batches(std::vector<std::size_t>& order,
                                                        std::size_t batch_size, Rng& rng);

/// Mini-batch RMSProp on squared error with a seeded shuffle per epoch.
/// After each epoch the model is scored on the validation set; the returned
/// model is the one with the highest validation accuracy (earliest on ties).
/// Stops after `patience` epochs without improvement. Throws NumericalError
/// naming the epoch and batch when a loss is not finite.
TrainResult train(Model model, const std::vector<TrainInstance>& train_set,
                  const std::vector<EvalInstance>& validation,
                  const Featurizer& featurizer, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

// `epoch<TAB>loss<TAB>val_acc<TAB>val_recall1<TAB>seconds`
void write_epoch_log_header(std::ostream& out);
void write_epoch_log_line(std::ostream& out, const EpochReport& report);

}  // namespace ccnrank
