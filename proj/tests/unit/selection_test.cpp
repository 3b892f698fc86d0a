#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hypsearch/error.hpp"
#include "hypsearch/rng.hpp"
#include "hypsearch/selection.hpp"

using namespace hypsearch;

namespace {

std::map<std::string, double> three_rewards() {
  return {{"a", 1.0}, {"b", 0.0}, {"c", 0.0}};
}

}  // namespace

TEST_CASE("efficiency curve fixed cases") {
  auto rewards = three_rewards();
  EfficiencyCurve best =
      efficiency_curve("best", {"a", "b", "c"}, rewards, 50);
  CHECK(best.y == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(best.auc == 1.0);

  EfficiencyCurve worst =
      efficiency_curve("worst", {"b", "c", "a"}, rewards, 50);
  CHECK(worst.y == std::vector<double>{0.0, 0.0, 1.0});
  CHECK(worst.auc == doctest::Approx(1.0 / 3.0));

  // window 1 keeps only the best seen so far
  EfficiencyCurve w1 = efficiency_curve("w1", {"b", "a", "c"}, rewards, 1);
  CHECK(w1.y == std::vector<double>{0.0, 1.0, 1.0});

  // mean aggregation divides by the kept count
  EfficiencyCurve mean_best = efficiency_curve("m", {"a", "b", "c"}, rewards,
                                               50, CurveAggregate::Mean);
  CHECK(mean_best.y[0] == doctest::Approx(1.0));
  CHECK(mean_best.y[1] == doctest::Approx(0.5));
  CHECK(mean_best.y[2] == doctest::Approx(1.0 / 3.0));
  CHECK(mean_best.auc == doctest::Approx(1.0));
}

TEST_CASE("efficiency curve properties") {
  Rng rng(909);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::string, double> rewards;
    std::vector<std::string> ids;
    int n = 5 + static_cast<int>(rng.index(40));
    for (int i = 0; i < n; ++i) {
      std::string id = "h" + std::to_string(1000 + i);
      rewards[id] = rng.uniform();
      ids.push_back(id);
    }
    size_t window = 1 + rng.index(10);

    std::vector<std::string> oracle_order = ids;
    std::sort(oracle_order.begin(), oracle_order.end(),
              [&](const std::string& a, const std::string& b) {
                return rewards[a] > rewards[b];
              });
    EfficiencyCurve oracle =
        efficiency_curve("oracle", oracle_order, rewards, window);
    CHECK(oracle.auc == doctest::Approx(1.0));

    double last_y = -1.0;
    for (int shuffle = 0; shuffle < 20; ++shuffle) {
      rng.shuffle(ids);
      EfficiencyCurve curve = efficiency_curve("s", ids, rewards, window);
      REQUIRE(curve.y.size() == static_cast<size_t>(n));
      // non-decreasing, dominated by the oracle, same endpoint
      for (size_t t = 1; t < curve.y.size(); ++t) {
        CHECK(curve.y[t] >= curve.y[t - 1]);
      }
      for (size_t t = 0; t < curve.y.size(); ++t) {
        CHECK(curve.y[t] <= oracle.y[t] + 1e-12);
      }
      CHECK(curve.y.back() == doctest::Approx(oracle.y.back()));
      CHECK(curve.auc <= oracle.auc + 1e-12);
      if (shuffle > 0) CHECK(curve.y.back() == doctest::Approx(last_y));
      last_y = curve.y.back();
    }
  }
}

TEST_CASE("efficiency curve rejects bad input") {
  auto rewards = three_rewards();
  CHECK_THROWS_AS(efficiency_curve("x", {"a", "zz"}, rewards, 50), Error);
  try {
    efficiency_curve("x", {"a"}, rewards, 0);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
  }
}

TEST_CASE("random baseline with one shuffle matches that shuffle's curve") {
  std::map<std::string, double> rewards;
  std::map<double, std::string> id_of;
  std::vector<double> base;
  for (int i = 0; i < 10; ++i) {
    std::string id = "r" + std::to_string(i);
    double value = static_cast<double>(i);
    rewards[id] = value;
    id_of[value] = id;
    base.push_back(value);  // map iterates in id order, r0..r9
  }
  Rng rng(4242);
  rng.shuffle(base);
  std::vector<std::string> ordering;
  for (double v : base) ordering.push_back(id_of.at(v));

  EfficiencyCurve baseline = random_baseline_curve(rewards, 3, 1, 4242);
  EfficiencyCurve direct = efficiency_curve("one", ordering, rewards, 3);
  CHECK(baseline.ordering_id == "random");
  CHECK(baseline.y == direct.y);
  CHECK(baseline.auc == doctest::Approx(direct.auc));
}

TEST_CASE("random baseline on constant rewards is exact") {
  std::map<std::string, double> rewards;
  for (int i = 0; i < 12; ++i) rewards["c" + std::to_string(i)] = 0.25;
  EfficiencyCurve baseline = random_baseline_curve(rewards, 5, 40, 7);
  for (size_t t = 0; t < baseline.y.size(); ++t) {
    double expected = 0.25 * static_cast<double>(std::min<size_t>(5, t + 1));
    CHECK(baseline.y[t] == doctest::Approx(expected));
  }
  CHECK(baseline.auc == doctest::Approx(1.0));
  CHECK_THROWS_AS(random_baseline_curve(rewards, 5, 0, 7), Error);
}

TEST_CASE("random baseline endpoint agrees with the oracle total") {
  Rng rng(31337);
  std::map<std::string, double> rewards;
  for (int i = 0; i < 30; ++i) {
    rewards["h" + std::to_string(100 + i)] = rng.uniform();
  }
  EfficiencyCurve baseline = random_baseline_curve(rewards, 8, 25, 12);
  std::vector<std::string> oracle_order;
  for (const auto& [id, r] : rewards) oracle_order.push_back(id);
  std::sort(oracle_order.begin(), oracle_order.end(),
            [&](const std::string& a, const std::string& b) {
              return rewards[a] > rewards[b];
            });
  EfficiencyCurve oracle =
      efficiency_curve("oracle", oracle_order, rewards, 8);
  CHECK(baseline.y.back() == doctest::Approx(oracle.y.back()).epsilon(1e-9));
  CHECK(baseline.auc <= 1.0 + 1e-12);
}

TEST_CASE("cosine similarity basics") {
  CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == 0.0);
  CHECK(cosine_similarity({1.0, 0.0}, {2.0, 0.0}) == doctest::Approx(1.0));
  CHECK(cosine_similarity({1.0, 1.0}, {-1.0, -1.0}) == doctest::Approx(-1.0));
  CHECK(cosine_similarity({0.0, 0.0}, {1.0, 0.0}) == 0.0);  // zero norm
  CHECK_THROWS_AS(cosine_similarity({1.0}, {1.0, 2.0}), Error);
}

TEST_CASE("greedy selection at alpha 1 is reward order with id ties") {
  std::vector<DiverseCandidate> candidates = {
      {"d", 0.5, {1.0, 0.0}},
      {"b", 0.9, {0.0, 1.0}},
      {"c", 0.5, {0.5, 0.5}},
      {"a", 0.1, {1.0, 1.0}},
  };
  DiversitySelection sel = greedy_diverse_select(candidates, 3, 1.0);
  CHECK(sel.ids == std::vector<std::string>{"b", "c", "d"});

  // equal rewards: pure id order
  for (auto& c : candidates) c.reward = 0.7;
  sel = greedy_diverse_select(candidates, 3, 1.0);
  CHECK(sel.ids == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("greedy selection at alpha 0 prefers the orthogonal item") {
  std::vector<DiverseCandidate> candidates = {
      {"a", 0.5, {1.0, 0.0}},
      {"b", 0.5, {1.0, 0.0}},
      {"c", 0.5, {0.0, 1.0}},
  };
  DiversitySelection sel = greedy_diverse_select(candidates, 3, 0.0);
  CHECK(sel.ids == std::vector<std::string>{"a", "c", "b"});
}

TEST_CASE("near-duplicate cluster plus one distinct item") {
  std::vector<DiverseCandidate> candidates;
  for (int i = 0; i < 11; ++i) {
    std::string id = (i < 10 ? "dup0" : "dup") + std::to_string(i);
    candidates.push_back(
        {id, 0.6, {1.0, 0.001 * static_cast<double>(i), 0.0}});
  }
  candidates.push_back({"solo", 0.6, {0.0, 0.0, 1.0}});

  DiversitySelection balanced = greedy_diverse_select(candidates, 3, 0.5);
  CHECK(std::count(balanced.ids.begin(), balanced.ids.end(), "solo") == 1);

  DiversitySelection greedy_only = greedy_diverse_select(candidates, 3, 1.0);
  CHECK(greedy_only.ids ==
        std::vector<std::string>{"dup00", "dup01", "dup02"});
  CHECK(std::count(greedy_only.ids.begin(), greedy_only.ids.end(), "solo") ==
        0);
}

TEST_CASE("selection output shape and similarity matrix") {
  std::vector<DiverseCandidate> candidates = {
      {"a", 1.0, {1.0, 0.0}},
      {"b", 0.5, {0.0, 1.0}},
  };
  DiversitySelection sel = greedy_diverse_select(candidates, 5, 0.5);
  CHECK(sel.ids.size() == 2);  // k larger than n takes everything
  REQUIRE(sel.similarity.size() == 2);
  CHECK(sel.similarity[0][0] == 1.0);
  CHECK(sel.similarity[1][1] == 1.0);
  CHECK(sel.similarity[0][1] == doctest::Approx(0.0));
  CHECK(sel.similarity[0][1] == sel.similarity[1][0]);
  REQUIRE(sel.n_score.size() == 2);  // per-item mean distance to the rest
  CHECK(sel.n_score[0] == doctest::Approx(1.0));
  CHECK(sel.n_score[1] == doctest::Approx(1.0));

  DiversitySelection single = greedy_diverse_select(candidates, 1, 0.5);
  CHECK(single.ids.size() == 1);
  CHECK(single.n_score == std::vector<double>{0.0});
}

TEST_CASE("n_score modes aggregate distances differently") {
  std::vector<DiverseCandidate> candidates = {
      {"a", 0.5, {1.0, 0.0}},
      {"b", 0.5, {1.0, 0.0}},
      {"c", 0.5, {0.0, 1.0}},
  };
  DiversitySelection mean_mode = greedy_diverse_select(candidates, 3, 1.0);
  CHECK(mean_mode.ids == std::vector<std::string>{"a", "b", "c"});
  // a: distances (0 to b, 1 to c)
  CHECK(mean_mode.n_score[0] == doctest::Approx(0.5));
  CHECK(mean_mode.n_score[2] == doctest::Approx(1.0));

  DiversitySelection min_mode =
      greedy_diverse_select(candidates, 3, 1.0, NScoreMode::MinDistance);
  CHECK(min_mode.ids == mean_mode.ids);
  CHECK(min_mode.n_score[0] == doctest::Approx(0.0));
  CHECK(min_mode.n_score[2] == doctest::Approx(1.0));
}

TEST_CASE("selection input order does not matter") {
  Rng rng(55);
  std::vector<DiverseCandidate> candidates;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> f = {rng.uniform(), rng.uniform(), rng.uniform()};
    candidates.push_back({"h" + std::to_string(10 + i), rng.uniform(), f});
  }
  DiversitySelection first = greedy_diverse_select(candidates, 6, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    rng.shuffle(candidates);
    DiversitySelection again = greedy_diverse_select(candidates, 6, 0.5);
    CHECK(again.ids == first.ids);
    CHECK(again.n_score == first.n_score);
  }
}

TEST_CASE("greedy selection rejects bad input") {
  CHECK_THROWS_AS(greedy_diverse_select({}, 3, 0.5), Error);
  std::vector<DiverseCandidate> one = {{"a", 0.5, {1.0}}};
  CHECK_THROWS_AS(greedy_diverse_select(one, 0, 0.5), Error);
  CHECK_THROWS_AS(greedy_diverse_select(one, 1, -0.1), Error);
  CHECK_THROWS_AS(greedy_diverse_select(one, 1, 1.5), Error);
  std::vector<DiverseCandidate> nan_reward = {
      {"a", std::nan(""), {1.0}}, {"b", 0.5, {1.0}}};
  CHECK_THROWS_AS(greedy_diverse_select(nan_reward, 1, 0.5), Error);
}
