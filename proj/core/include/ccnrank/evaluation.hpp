#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ccnrank/corpus.hpp"
#include "ccnrank/models.hpp"
#include "ccnrank/vocab.hpp"

namespace ccnrank {

using CandidateScores = std::array<double, kCandidatesPerInstance>;

struct ScoredCandidateSet {
  CandidateScores probabilities{};
  CandidateScores cwf{};
  std::size_t correct_index = 0;
};

struct RecallReport {
  std::map<std::size_t, double> recall_at;  // keys 1, 2, 5
  std::size_t n_instances = 0;
  double scale = 0.0;

  double recall(std::size_t k) const;  // throws ContractError for unknown k
  friend bool operator==(const RecallReport&, const RecallReport&) = default;
};

/// 1-based rank of `scores[correct]`; tied candidates count as ranked above
/// it. Throws ContractError on non-finite scores.
std::size_t rank_candidates(std::span<const double> scores, std::size_t correct = 0);

/// Fraction of ranks that are <= k. An empty input yields 0.
double recall_at_k(std::span<const std::size_t> ranks, std::size_t k);

/// probability + scale * cwf, per candidate.
CandidateScores cwf_rescore(const ScoredCandidateSet& set, double scale);

/// {0} plus 1e-4..1e2 and 3e-4..3e1 in decades, ascending.
std::vector<double> default_scale_grid();

/// Grid value with the highest Recall@1 on `sets`; ties go to the smaller
/// scale. The grid must be non-empty and contain 0.
double tune_scale(std::span<const ScoredCandidateSet> sets, std::span<const double> grid);

/// Unweighted mean of member score vectors.
CandidateScores ensemble_scores(std::span<const CandidateScores> members);

/// Anything that produces one probability per candidate.
class CandidateScorer {
 public:
  virtual ~CandidateScorer() = default;
  virtual CandidateScores score(const EvalInstance& instance) const = 0;
  virtual std::uint64_t vocabulary_hash() const = 0;
};

class ModelScorer final : public CandidateScorer {
 public:
  ModelScorer(std::shared_ptr<const Model> model, std::shared_ptr<const Featurizer> featurizer);

  CandidateScores score(const EvalInstance& instance) const override;
  std::uint64_t vocabulary_hash() const override { return model_->vocabulary_hash(); }

 private:
  std::shared_ptr<const Model> model_;
  std::shared_ptr<const Featurizer> featurizer_;
};

/// Ensemble probabilities and CWF values for every instance. Results are in
/// input order whatever the thread count. Throws ContractError if a scorer's
/// vocabulary hash differs from `vocab`.
std::vector<ScoredCandidateSet> score_instances(
    std::span<const CandidateScorer* const> scorers, const std::vector<EvalInstance>& instances,
    const Vocabulary& vocab, std::size_t threads = 1);

RecallReport recall_report(std::span<const ScoredCandidateSet> sets, double scale);

RecallReport evaluate(std::span<const CandidateScorer* const> scorers,
                      const std::vector<EvalInstance>& instances, const Vocabulary& vocab,
                      double scale, std::size_t threads = 1);

// `metric<TAB>value` lines.
void write_report(std::ostream& out, const RecallReport& report);

}  // namespace ccnrank
