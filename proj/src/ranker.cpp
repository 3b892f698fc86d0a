#include "hypsearch/ranker.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hypsearch/error.hpp"
#include "hypsearch/rng.hpp"

namespace hypsearch {

namespace {

std::vector<double> standardize(const RankerState& state,
                                const std::vector<double>& f) {
  std::vector<double> z(f.size());
  for (size_t d = 0; d < f.size(); ++d) {
    z[d] = (f[d] - state.mean[d]) / state.std_dev[d];
  }
  return z;
}

double logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

RankerState fit(const std::vector<RankerItem>& train, const RankerConfig& config,
                uint64_t seed) {
  if (train.size() < 2) {
    throw Error(Errc::DegenerateTraining, "need at least two training items");
  }
  size_t dims = train[0].first.size();
  for (const RankerItem& item : train) {
    if (item.first.size() != dims) {
      throw Error(Errc::LengthMismatch, "inconsistent feature lengths");
    }
  }

  RankerState state;
  state.config = config;
  state.seed = seed;
  state.mean.assign(dims, 0.0);
  state.std_dev.assign(dims, 0.0);
  state.weights.assign(dims, 0.0);
  size_t n = train.size();
  for (const RankerItem& item : train) {
    for (size_t d = 0; d < dims; ++d) state.mean[d] += item.first[d];
  }
  for (size_t d = 0; d < dims; ++d) state.mean[d] /= static_cast<double>(n);
  for (const RankerItem& item : train) {
    for (size_t d = 0; d < dims; ++d) {
      double diff = item.first[d] - state.mean[d];
      state.std_dev[d] += diff * diff;
    }
  }
  for (size_t d = 0; d < dims; ++d) {
    state.std_dev[d] = std::sqrt(state.std_dev[d] / static_cast<double>(n));
    if (state.std_dev[d] == 0.0) state.std_dev[d] = 1.0;
  }

  std::vector<std::vector<double>> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = standardize(state, train[i].first);

  // every ordered pair with a strictly greater reward
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = 0; j < n; ++j) {
      if (train[i].second > train[j].second) pairs.emplace_back(i, j);
    }
  }
  if (pairs.empty()) {
    throw Error(Errc::DegenerateTraining, "all rewards are equal");
  }
  size_t want = std::min(config.max_pairs, pairs.size());
  if (want < pairs.size()) {
    // partial Fisher-Yates: the first `want` slots become the sample
    Rng rng(seed);
    for (size_t i = 0; i < want; ++i) {
      size_t j = i + rng.index(pairs.size() - i);
      std::swap(pairs[i], pairs[j]);
    }
    pairs.resize(want);
  }

  std::vector<double> grad(dims);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& [i, j] : pairs) {
      double si = state.bias, sj = state.bias;
      for (size_t d = 0; d < dims; ++d) {
        si += state.weights[d] * z[i][d];
        sj += state.weights[d] * z[j][d];
      }
      // d/ds_i log(1 + exp(-(s_i - s_j))) = sigmoid(s_i - s_j) - 1
      double pull = logistic(si - sj) - 1.0;
      for (size_t d = 0; d < dims; ++d) {
        grad[d] += pull * (z[i][d] - z[j][d]);
      }
    }
    double scale = config.step / static_cast<double>(pairs.size());
    for (size_t d = 0; d < dims; ++d) {
      state.weights[d] -= scale * grad[d];
    }
  }
  return state;
}

double score(const RankerState& state, const std::vector<double>& features) {
  if (features.size() != state.weights.size()) {
    throw Error(Errc::LengthMismatch,
                "expected " + std::to_string(state.weights.size()) +
                    " features, got " + std::to_string(features.size()));
  }
  double s = state.bias;
  for (size_t d = 0; d < features.size(); ++d) {
    s += state.weights[d] * (features[d] - state.mean[d]) / state.std_dev[d];
  }
  return s;
}

std::vector<std::string> top_k(
    const RankerState& state,
    const std::vector<std::pair<std::string, std::vector<double>>>& candidates,
    size_t k) {
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(candidates.size());
  for (const auto& [id, features] : candidates) {
    scored.emplace_back(score(state, features), id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (k < scored.size()) scored.resize(k);
  std::vector<std::string> ids;
  ids.reserve(scored.size());
  for (const auto& [s, id] : scored) ids.push_back(id);
  return ids;
}

RankingMetrics ranking_metrics(const std::vector<double>& predicted,
                               const std::vector<double>& actual) {
  RankingMetrics m;
  m.kendall = kendall_tau(predicted, actual);
  m.spearman = spearman(predicted, actual);
  m.pearson = pearson(predicted, actual);
  return m;
}

std::map<std::pair<std::string, std::string>, RankingMetrics> cross_eval(
    const std::map<std::string, RankerState>& states,
    const std::map<std::string, std::vector<RankerItem>>& data) {
  std::map<std::pair<std::string, std::string>, RankingMetrics> matrix;
  for (const auto& [train_source, state] : states) {
    for (const auto& [test_source, items] : data) {
      std::vector<double> predicted, actual;
      predicted.reserve(items.size());
      actual.reserve(items.size());
      for (const RankerItem& item : items) {
        predicted.push_back(score(state, item.first));
        actual.push_back(item.second);
      }
      matrix[{train_source, test_source}] = ranking_metrics(predicted, actual);
    }
  }
  return matrix;
}

std::string ranker_to_json(const RankerState& state) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["feature_count"] = state.weights.size();
  doc["mean"] = state.mean;
  doc["std"] = state.std_dev;
  doc["weights"] = state.weights;
  doc["bias"] = state.bias;
  doc["config"] = {{"max_pairs", state.config.max_pairs},
                   {"step", state.config.step},
                   {"epochs", state.config.epochs}};
  doc["seed"] = state.seed;
  return doc.dump(2) + "\n";
}

RankerState ranker_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptRecord, std::string("bad ranker json: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != 1) {
      throw Error(Errc::CorruptRecord, "unsupported ranker version");
    }
    RankerState state;
    state.mean = doc.at("mean").get<std::vector<double>>();
    state.std_dev = doc.at("std").get<std::vector<double>>();
    state.weights = doc.at("weights").get<std::vector<double>>();
    state.bias = doc.at("bias").get<double>();
    state.config.max_pairs = doc.at("config").at("max_pairs").get<size_t>();
    state.config.step = doc.at("config").at("step").get<double>();
    state.config.epochs = doc.at("config").at("epochs").get<int>();
    state.seed = doc.at("seed").get<uint64_t>();
    size_t f = doc.at("feature_count").get<size_t>();
    if (state.weights.size() != f || state.mean.size() != f ||
        state.std_dev.size() != f) {
      throw Error(Errc::CorruptRecord, "ranker field lengths disagree");
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CorruptRecord, std::string("bad ranker json: ") + e.what());
  }
}

}  // namespace hypsearch
