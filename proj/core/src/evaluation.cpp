#include "ccnrank/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "ccnrank/errors.hpp"
#include "ccnrank/hash.hpp"

namespace ccnrank {
namespace {

constexpr std::array<std::size_t, 3> kReportedK = {1, 2, 5};

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception
// thrown by any worker is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

double RecallReport::recall(std::size_t k) const {
  const auto it = recall_at.find(k);
  if (it == recall_at.end()) throw ContractError("no recall@" + std::to_string(k) + " in report");
  return it->second;
}

std::size_t rank_candidates(std::span<const double> scores, std::size_t correct) {
  if (correct >= scores.size()) throw ContractError("correct candidate index out of range");
  for (double s : scores) {
    if (!std::isfinite(s)) throw ContractError("rank_candidates: non-finite score");
  }
  const double target = scores[correct];
  std::size_t rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i != correct && scores[i] >= target) ++rank;
  }
  return rank;
}

double recall_at_k(std::span<const std::size_t> ranks, std::size_t k) {
  if (k < 1 || k > kCandidatesPerInstance) {
    throw ContractError("recall_at_k: k must lie in 1..10");
  }
  if (ranks.empty()) return 0.0;
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

CandidateScores cwf_rescore(const ScoredCandidateSet& set, double scale) {
  if (!(scale >= 0.0)) throw ContractError("cwf scale must be non-negative");
  CandidateScores adjusted{};
  for (std::size_t i = 0; i < adjusted.size(); ++i) {
    adjusted[i] = set.probabilities[i] + scale * set.cwf[i];
  }
  return adjusted;
}

std::vector<double> default_scale_grid() {
  std::vector<double> grid = {0.0};
  for (int e = -4; e <= 2; ++e) grid.push_back(std::pow(10.0, e));
  for (int e = -4; e <= 1; ++e) grid.push_back(3.0 * std::pow(10.0, e));
  std::sort(grid.begin(), grid.end());
  return grid;
}

RecallReport recall_report(std::span<const ScoredCandidateSet> sets, double scale) {
  std::vector<std::size_t> ranks;
  ranks.reserve(sets.size());
  for (const auto& set : sets) {
    ranks.push_back(rank_candidates(cwf_rescore(set, scale), set.correct_index));
  }
  RecallReport report;
  for (std::size_t k : kReportedK) report.recall_at[k] = recall_at_k(ranks, k);
  report.n_instances = sets.size();
  report.scale = scale;
  return report;
}

double tune_scale(std::span<const ScoredCandidateSet> sets, std::span<const double> grid) {
  if (grid.empty()) throw ContractError("tune_scale: empty grid");
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    throw ContractError("tune_scale: grid must contain 0");
  }
  double best_scale = 0.0;
  double best_recall = -1.0;
  for (double scale : grid) {
    const double r1 = recall_report(sets, scale).recall(1);
    if (r1 > best_recall || (r1 == best_recall && scale < best_scale)) {
      best_recall = r1;
      best_scale = scale;
    }
  }
  return best_scale;
}

CandidateScores ensemble_scores(std::span<const CandidateScores> members) {
  if (members.empty()) throw ContractError("ensemble_scores: no members");
  // Extended-precision sums make the mean of identical members exact.
  std::array<long double, kCandidatesPerInstance> sum{};
  for (const auto& m : members) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m[i];
  }
  CandidateScores mean{};
  const auto n = static_cast<double>(members.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const auto narrow = static_cast<double>(sum[i]);
    // A sum that fits a double is divided there, which rounds once; the
    // extended path keeps n copies of x dividing back to exactly x.
    mean[i] = static_cast<long double>(narrow) == sum[i]
                  ? narrow / n
                  : static_cast<double>(sum[i] / static_cast<long double>(n));
  }
  return mean;
}

ModelScorer::ModelScorer(std::shared_ptr<const Model> model,
                         std::shared_ptr<const Featurizer> featurizer)
    : model_(std::move(model)), featurizer_(std::move(featurizer)) {
  if (!model_ || !featurizer_) throw ContractError("ModelScorer needs a model and a featurizer");
  if (featurizer_->vocabulary().hash() != model_->vocabulary_hash()) {
    throw ContractError("featurizer vocabulary does not match the model");
  }
}

CandidateScores ModelScorer::score(const EvalInstance& instance) const {
  CandidateScores out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = model_->predict((*featurizer_)(instance.context, instance.candidates[i]));
  }
  return out;
}

std::vector<ScoredCandidateSet> score_instances(
    std::span<const CandidateScorer* const> scorers, const std::vector<EvalInstance>& instances,
    const Vocabulary& vocab, std::size_t threads) {
  if (scorers.empty()) throw ContractError("no scorers given");
  const std::uint64_t expected = vocab.hash();
  for (std::size_t m = 0; m < scorers.size(); ++m) {
    if (scorers[m]->vocabulary_hash() != expected) {
      throw ContractError("model " + std::to_string(m) + " has vocabulary hash " +
                          to_hex(scorers[m]->vocabulary_hash()) + ", expected " +
                          to_hex(expected));
    }
  }
  std::vector<ScoredCandidateSet> sets(instances.size());
  parallel_for(instances.size(), threads, [&](std::size_t n) {
    const auto& x = instances[n];
    std::vector<CandidateScores> members;
    members.reserve(scorers.size());
    for (const auto* scorer : scorers) members.push_back(scorer->score(x));
    ScoredCandidateSet& set = sets[n];
    set.probabilities = ensemble_scores(members);
    for (std::size_t i = 0; i < kCandidatesPerInstance; ++i) {
      set.cwf[i] = cwf_score(x.context, x.candidates[i], vocab);
    }
  });
  return sets;
}

RecallReport evaluate(std::span<const CandidateScorer* const> scorers,
                      const std::vector<EvalInstance>& instances, const Vocabulary& vocab,
                      double scale, std::size_t threads) {
  const auto sets = score_instances(scorers, instances, vocab, threads);
  return recall_report(sets, scale);
}

void write_report(std::ostream& out, const RecallReport& report) {
  char buf[64];
  for (const auto& [k, value] : report.recall_at) {
    std::snprintf(buf, sizeof buf, "%.6f", value);
    out << "recall@" << k << '\t' << buf << '\n';
  }
  out << "n_instances\t" << report.n_instances << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", report.scale);
  out << "scale\t" << buf << '\n';
}

}  // namespace ccnrank
