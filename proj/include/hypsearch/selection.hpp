#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hypsearch {

// Sum keeps the y invariants (non-decreasing, shared endpoint); Mean divides
// each y_t by min(W, t).
enum class CurveAggregate { Sum, Mean };

// y_t aggregates the top-min(W, t) rewards among the first t candidates of
// one ordering; auc = mean(y) / mean(oracle y), 1 when the oracle's own
// mean is zero.
struct EfficiencyCurve {
  std::string ordering_id;
  std::vector<double> y;
  double auc = 0.0;
};

EfficiencyCurve efficiency_curve(const std::string& ordering_id,
                                 const std::vector<std::string>& ordering,
                                 const std::map<std::string, double>& rewards,
                                 size_t window,
                                 CurveAggregate aggregate = CurveAggregate::Sum);

// Pointwise mean of y over S seeded shuffles of the reward ids.
EfficiencyCurve random_baseline_curve(const std::map<std::string, double>& rewards,
                                      size_t window, size_t shuffles,
                                      uint64_t seed,
                                      CurveAggregate aggregate = CurveAggregate::Sum);

struct DiverseCandidate {
  std::string id;
  double reward = 0.0;
  std::vector<double> features;
};

// Per-item novelty: distance of a selected item to the other selected items,
// aggregated by mean (default) or min.
enum class NScoreMode { MeanDistance, MinDistance };

struct DiversitySelection {
  std::vector<std::string> ids;  // in pick order
  std::vector<double> n_score;   // cosine distance to the rest, in [0, 2]
  std::vector<std::vector<double>> similarity;  // cosine, |ids| x |ids|
};

// Greedy reward/diversity trade-off: rewards min-max normalized to [0,1]
// (constant -> all 0.5); first pick is the best normalized reward; later
// picks maximize alpha * norm_reward + (1 - alpha) * min cosine distance
// to the selected set / 2. All ties break toward the smaller id.
DiversitySelection greedy_diverse_select(
    const std::vector<DiverseCandidate>& candidates, size_t k, double alpha,
    NScoreMode n_score_mode = NScoreMode::MeanDistance);

// Cosine similarity with zero-norm vectors mapped to 0.
double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

}  // namespace hypsearch
