#include "hypsearch/selection.hpp"

#include <algorithm>
#include <cmath>

#include "hypsearch/error.hpp"
#include "hypsearch/rng.hpp"

namespace hypsearch {

namespace {

// Running top-window aggregate: y[t-1] after the t-th reward arrives. The
// window is kept sorted descending and resummed in that fixed order each
// step; summing successive windows whose sorted elements dominate pairwise
// keeps y non-decreasing even in floating point (an incremental
// add-the-arrival, subtract-the-evicted sum can dip by an ulp).
std::vector<double> curve_y(const std::vector<double>& rewards, size_t window,
                            CurveAggregate aggregate) {
  std::vector<double> kept;
  kept.reserve(window + 1);
  std::vector<double> y;
  y.reserve(rewards.size());
  for (double r : rewards) {
    kept.insert(std::upper_bound(kept.begin(), kept.end(), r,
                                 std::greater<double>()),
                r);
    if (kept.size() > window) kept.pop_back();
    double sum = 0.0;
    for (double v : kept) sum += v;
    y.push_back(aggregate == CurveAggregate::Sum
                    ? sum
                    : sum / static_cast<double>(kept.size()));
  }
  return y;
}

std::vector<double> rewards_in_order(const std::vector<std::string>& ordering,
                                     const std::map<std::string, double>& rewards) {
  std::vector<double> r;
  r.reserve(ordering.size());
  for (const std::string& id : ordering) {
    auto it = rewards.find(id);
    if (it == rewards.end()) {
      throw Error(Errc::UnknownId, "no reward for " + id);
    }
    r.push_back(it->second);
  }
  return r;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Oracle y over the same multiset: rewards visited best-first.
std::vector<double> oracle_y(std::vector<double> rewards, size_t window,
                             CurveAggregate aggregate) {
  std::sort(rewards.begin(), rewards.end(), std::greater<double>());
  return curve_y(rewards, window, aggregate);
}

double normalized_auc(const std::vector<double>& y,
                      const std::vector<double>& oracle) {
  double oracle_mean = mean_of(oracle);
  if (oracle_mean == 0.0) return 1.0;
  return mean_of(y) / oracle_mean;
}

}  // namespace

EfficiencyCurve efficiency_curve(const std::string& ordering_id,
                                 const std::vector<std::string>& ordering,
                                 const std::map<std::string, double>& rewards,
                                 size_t window, CurveAggregate aggregate) {
  if (window < 1) {
    throw Error(Errc::InvalidConfig, "window must be >= 1");
  }
  EfficiencyCurve curve;
  curve.ordering_id = ordering_id;
  std::vector<double> r = rewards_in_order(ordering, rewards);
  curve.y = curve_y(r, window, aggregate);
  curve.auc = normalized_auc(curve.y, oracle_y(r, window, aggregate));
  return curve;
}

EfficiencyCurve random_baseline_curve(const std::map<std::string, double>& rewards,
                                      size_t window, size_t shuffles,
                                      uint64_t seed, CurveAggregate aggregate) {
  if (window < 1) {
    throw Error(Errc::InvalidConfig, "window must be >= 1");
  }
  if (shuffles < 1) {
    throw Error(Errc::InvalidConfig, "need at least one shuffle");
  }
  std::vector<double> base;
  base.reserve(rewards.size());
  for (const auto& [id, r] : rewards) base.push_back(r);

  EfficiencyCurve curve;
  curve.ordering_id = "random";
  curve.y.assign(base.size(), 0.0);
  Rng rng(seed);
  for (size_t s = 0; s < shuffles; ++s) {
    std::vector<double> shuffled = base;
    rng.shuffle(shuffled);
    std::vector<double> y = curve_y(shuffled, window, aggregate);
    for (size_t t = 0; t < y.size(); ++t) curve.y[t] += y[t];
  }
  for (double& v : curve.y) v /= static_cast<double>(shuffles);
  curve.auc = normalized_auc(curve.y, oracle_y(base, window, aggregate));
  return curve;
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch, "feature lengths differ");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

DiversitySelection greedy_diverse_select(
    const std::vector<DiverseCandidate>& candidates, size_t k, double alpha,
    NScoreMode n_score_mode) {
  if (candidates.empty()) {
    throw Error(Errc::EmptyCandidates, "nothing to select from");
  }
  if (k < 1) {
    throw Error(Errc::InvalidConfig, "k must be >= 1");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(Errc::InvalidConfig, "alpha must be in [0, 1]");
  }
  for (const DiverseCandidate& c : candidates) {
    if (!std::isfinite(c.reward)) {
      throw Error(Errc::InvalidConfig, "non-finite reward for " + c.id);
    }
  }

  // scan in id order so a plain strict-greater comparison implements the
  // smallest-id tie rule
  std::vector<size_t> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return candidates[a].id < candidates[b].id;
  });

  double lo = candidates[0].reward, hi = candidates[0].reward;
  for (const DiverseCandidate& c : candidates) {
    lo = std::min(lo, c.reward);
    hi = std::max(hi, c.reward);
  }
  std::vector<double> norm(candidates.size(), 0.5);
  if (hi > lo) {
    for (size_t i = 0; i < candidates.size(); ++i) {
      norm[i] = (candidates[i].reward - lo) / (hi - lo);
    }
  }

  size_t want = std::min(k, candidates.size());
  std::vector<size_t> picked;
  std::vector<char> taken(candidates.size(), 0);
  // min cosine distance to the selected set so far, in [0, 2]; the pick
  // formula halves it
  std::vector<double> min_dist(candidates.size(), 0.0);

  for (size_t round = 0; round < want; ++round) {
    double best = 0.0;
    size_t best_idx = candidates.size();
    for (size_t idx : order) {
      if (taken[idx]) continue;
      double value = round == 0
                         ? norm[idx]
                         : alpha * norm[idx] + (1.0 - alpha) * min_dist[idx] / 2.0;
      if (best_idx == candidates.size() || value > best) {
        best = value;
        best_idx = idx;
      }
    }
    taken[best_idx] = 1;
    picked.push_back(best_idx);
    for (size_t idx : order) {
      if (taken[idx]) continue;
      double dist = 1.0 - cosine_similarity(candidates[idx].features,
                                            candidates[best_idx].features);
      if (picked.size() == 1 || dist < min_dist[idx]) min_dist[idx] = dist;
    }
  }

  DiversitySelection selection;
  selection.ids.reserve(picked.size());
  for (size_t idx : picked) selection.ids.push_back(candidates[idx].id);
  selection.similarity.assign(picked.size(), std::vector<double>(picked.size(), 1.0));
  for (size_t a = 0; a < picked.size(); ++a) {
    for (size_t b = 0; b < picked.size(); ++b) {
      if (a == b) continue;
      selection.similarity[a][b] = cosine_similarity(
          candidates[picked[a]].features, candidates[picked[b]].features);
    }
  }
  selection.n_score.assign(picked.size(), 0.0);
  if (picked.size() > 1) {
    for (size_t a = 0; a < picked.size(); ++a) {
      double total = 0.0;
      double least = 2.0;
      for (size_t b = 0; b < picked.size(); ++b) {
        if (a == b) continue;
        double dist = 1.0 - selection.similarity[a][b];
        total += dist;
        least = std::min(least, dist);
      }
      selection.n_score[a] =
          n_score_mode == NScoreMode::MeanDistance
              ? total / static_cast<double>(picked.size() - 1)
              : least;
    }
  }
  return selection;
}

}  // namespace hypsearch
