#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hypsearch/error.hpp"
#include "hypsearch/ranker.hpp"
#include "hypsearch/rng.hpp"

using namespace hypsearch;

namespace {

// reward = w_true . f + sigma * noise over uniform features
std::vector<RankerItem> synthetic(Rng& rng, size_t n, double sigma) {
  const std::vector<double> w_true = {2.0, -1.0, 0.5, 0.0, 1.5, -0.25};
  std::vector<RankerItem> items;
  items.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> f(w_true.size());
    for (double& x : f) x = rng.uniform();
    double r = 0.0;
    for (size_t d = 0; d < f.size(); ++d) r += w_true[d] * f[d];
    items.emplace_back(std::move(f), r + sigma * rng.normal());
  }
  return items;
}

double tau_of(const RankerState& state, const std::vector<RankerItem>& items) {
  std::vector<double> predicted, actual;
  for (const RankerItem& item : items) {
    predicted.push_back(score(state, item.first));
    actual.push_back(item.second);
  }
  return kendall_tau(predicted, actual).coefficient;
}

}  // namespace

TEST_CASE("fit reproduces a single-feature ordering exactly") {
  std::vector<RankerItem> train;
  for (int i = 0; i < 40; ++i) {
    // constant columns standardize to zero and stay weightless
    std::vector<double> f = {static_cast<double>(i) * 0.1, 5.0, -2.0};
    train.emplace_back(std::move(f), static_cast<double>(i));
  }
  RankerState state = fit(train, RankerConfig{}, 7);
  CHECK(tau_of(state, train) == 1.0);
  CHECK(state.bias == 0.0);  // pair loss has no bias gradient
  CHECK(state.weights.size() == 3);
  CHECK(state.weights[0] > 0.0);
  CHECK(state.weights[1] == 0.0);
  CHECK(state.weights[2] == 0.0);
}

TEST_CASE("fit rejects degenerate training sets") {
  std::vector<RankerItem> one = {{{1.0, 2.0}, 0.5}};
  CHECK_THROWS_AS(fit(one, RankerConfig{}, 1), Error);

  std::vector<RankerItem> flat = {{{1.0}, 0.5}, {{2.0}, 0.5}, {{3.0}, 0.5}};
  try {
    fit(flat, RankerConfig{}, 1);
    FAIL("expected DegenerateTraining");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateTraining);
  }

  std::vector<RankerItem> ragged = {{{1.0, 2.0}, 0.5}, {{1.0}, 0.7}};
  CHECK_THROWS_AS(fit(ragged, RankerConfig{}, 1), Error);
}

TEST_CASE("fit is deterministic for a fixed seed") {
  Rng rng(99);
  std::vector<RankerItem> train = synthetic(rng, 80, 0.1);
  RankerConfig config;
  config.max_pairs = 1000;  // below the 3160 available, so sampling runs
  RankerState a = fit(train, config, 42);
  RankerState b = fit(train, config, 42);
  CHECK(a.weights == b.weights);
  CHECK(a.mean == b.mean);
  CHECK(a.std_dev == b.std_dev);
  RankerState c = fit(train, config, 43);
  CHECK(a.weights != c.weights);
}

TEST_CASE("score is the standardized linear form") {
  RankerState state;
  state.mean = {1.0, 2.0};
  state.std_dev = {2.0, 4.0};
  state.weights = {0.0, 0.0};
  CHECK(score(state, {5.0, -3.0}) == 0.0);
  state.weights = {1.0, 0.5};
  // (3-1)/2 * 1 + (6-2)/4 * 0.5 = 1 + 0.5
  CHECK(score(state, {3.0, 6.0}) == doctest::Approx(1.5));
  CHECK(score(state, {5.0, -3.0}) < score(state, {7.0, -3.0}));
  CHECK_THROWS_AS(score(state, {1.0}), Error);
}

TEST_CASE("top_k sorts by score then id") {
  RankerState state;
  state.mean = {0.0};
  state.std_dev = {1.0};
  state.weights = {1.0};
  std::vector<std::pair<std::string, std::vector<double>>> candidates = {
      {"c", {1.0}}, {"a", {1.0}}, {"b", {3.0}}, {"d", {-1.0}},
  };
  std::vector<std::string> all = top_k(state, candidates, 10);
  CHECK(all == std::vector<std::string>{"b", "a", "c", "d"});
  CHECK(top_k(state, candidates, 2) == std::vector<std::string>{"b", "a"});
  CHECK(top_k(state, candidates, 0).empty());

  // oracle comparison on random scores
  Rng rng(17);
  candidates.clear();
  for (int i = 0; i < 50; ++i) {
    candidates.push_back({"id" + std::to_string(100 + i), {rng.uniform()}});
  }
  std::vector<std::pair<double, std::string>> expected;
  for (const auto& [id, f] : candidates) expected.emplace_back(-f[0], id);
  std::sort(expected.begin(), expected.end());
  std::vector<std::string> oracle;
  for (int i = 0; i < 5; ++i) oracle.push_back(expected[i].second);
  CHECK(top_k(state, candidates, 5) == oracle);
}

TEST_CASE("held-out tau on noisy linear rewards") {
  Rng rng(2718);
  std::vector<RankerItem> train = synthetic(rng, 500, 0.05);
  std::vector<RankerItem> test = synthetic(rng, 200, 0.05);
  RankerState state = fit(train, RankerConfig{}, 31);
  CHECK(tau_of(state, test) >= 0.9);
}

TEST_CASE("ranker state json round-trips") {
  Rng rng(5);
  std::vector<RankerItem> train = synthetic(rng, 60, 0.1);
  RankerState state = fit(train, RankerConfig{}, 11);
  RankerState back = ranker_from_json(ranker_to_json(state));
  CHECK(back.weights == state.weights);
  CHECK(back.mean == state.mean);
  CHECK(back.std_dev == state.std_dev);
  CHECK(back.bias == state.bias);
  CHECK(back.seed == state.seed);
  CHECK(back.config.max_pairs == state.config.max_pairs);
  CHECK(back.config.epochs == state.config.epochs);
  CHECK(score(back, train[0].first) == score(state, train[0].first));

  CHECK_THROWS_AS(ranker_from_json("not json"), Error);
  CHECK_THROWS_AS(ranker_from_json("{\"version\": 9}"), Error);
}

TEST_CASE("cross_eval scores each state on each source") {
  Rng rng(64);
  std::map<std::string, std::vector<RankerItem>> data;
  data["s1"] = synthetic(rng, 120, 0.05);
  data["s2"] = synthetic(rng, 120, 0.05);
  std::map<std::string, RankerState> states;
  states["s1"] = fit(data["s1"], RankerConfig{}, 1);
  states["s2"] = fit(data["s2"], RankerConfig{}, 2);
  auto matrix = cross_eval(states, data);
  REQUIRE(matrix.size() == 4);

  // a state on its own training data beats a permuted-label control
  std::vector<double> predicted, actual;
  for (const RankerItem& item : data.at("s1")) {
    predicted.push_back(score(states.at("s1"), item.first));
    actual.push_back(item.second);
  }
  std::vector<double> shuffled = actual;
  Rng control(3);
  control.shuffle(shuffled);
  double own = matrix.at({"s1", "s1"}).kendall.coefficient;
  CHECK(own == kendall_tau(predicted, actual).coefficient);
  CHECK(own >= kendall_tau(predicted, shuffled).coefficient);
  CHECK(own > 0.8);  // same linear law underneath
}
