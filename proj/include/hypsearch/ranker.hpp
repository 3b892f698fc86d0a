#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hypsearch/stats.hpp"

namespace hypsearch {

struct RankerConfig {
  size_t max_pairs = 5000;  // P = min(max_pairs, ordered pairs available)
  double step = 0.05;
  int epochs = 200;
};

// Linear scorer over standardized features, trained with a pairwise
// logistic ranking loss. Immutable once fitted.
struct RankerState {
  std::vector<double> mean;     // standardizer, per dimension
  std::vector<double> std_dev;  // zero-variance dims mapped to 1
  std::vector<double> weights;
  double bias = 0.0;
  RankerConfig config;
  uint64_t seed = 0;
};

// (features, reward) training item.
using RankerItem = std::pair<std::vector<double>, double>;

// Samples up to config.max_pairs ordered pairs with reward_i > reward_j
// and minimizes mean log(1 + exp(-(s_i - s_j))) by full-batch gradient
// descent. Deterministic given the seed. Throws DegenerateTraining when
// fewer than two items or all rewards are equal.
RankerState fit(const std::vector<RankerItem>& train, const RankerConfig& config,
                uint64_t seed);

// w . standardize(f) + bias. Throws LengthMismatch.
double score(const RankerState& state, const std::vector<double>& features);

// Ids of the k highest scores, score descending, ties by ascending id.
// k >= n returns everything.
std::vector<std::string> top_k(
    const RankerState& state,
    const std::vector<std::pair<std::string, std::vector<double>>>& candidates,
    size_t k);

struct RankingMetrics {
  Corr kendall;
  Corr spearman;
  Corr pearson;
};

// All three rank correlations of predicted scores against true rewards.
RankingMetrics ranking_metrics(const std::vector<double>& predicted,
                               const std::vector<double>& actual);

// Each row's state scores every column's items: (train source, test source)
// -> metrics of score vs reward.
std::map<std::pair<std::string, std::string>, RankingMetrics> cross_eval(
    const std::map<std::string, RankerState>& states,
    const std::map<std::string, std::vector<RankerItem>>& data);

// Versioned JSON round-trip.
std::string ranker_to_json(const RankerState& state);
RankerState ranker_from_json(const std::string& text);

}  // namespace hypsearch
