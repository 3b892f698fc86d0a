#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hypsearch/error.hpp"
#include "hypsearch/reward.hpp"
#include "hypsearch/rng.hpp"

using namespace hypsearch;

namespace {

// Direct O(n^2) pair enumeration; integer wins, same final division shape
// as the production code so equality can be exact.
double oracle_pairwise(const std::vector<double>& h, const std::vector<double>& b) {
  uint64_t wins = 0;
  for (double a : h) {
    for (double c : b) {
      if (a < c) ++wins;
    }
  }
  return static_cast<double>(wins) /
         (static_cast<double>(h.size()) * static_cast<double>(b.size()));
}

uint64_t oracle_ties(const std::vector<double>& h, const std::vector<double>& b) {
  uint64_t ties = 0;
  for (double a : h) {
    for (double c : b) {
      if (a == c) ++ties;
    }
  }
  return ties;
}

double oracle_b_wr(const LossRow& h, const LossTable& base,
                   const std::vector<std::string>& tasks,
                   const std::vector<std::string>& ids) {
  double sum = 0.0;
  for (const std::string& task : tasks) {
    for (const std::string& id : ids) {
      sum += oracle_pairwise(h.at(task), base.at({id, task}));
    }
  }
  return sum / static_cast<double>(tasks.size() * ids.size());
}

double oracle_bsota(const LossRow& h, const LossTable& base,
                    const std::vector<std::string>& tasks,
                    const std::vector<std::string>& ids) {
  double sum = 0.0;
  for (const std::string& task : tasks) {
    std::string best_id;
    double best_mean = 0.0;
    bool first = true;
    for (const std::string& id : ids) {
      const std::vector<double>& cell = base.at({id, task});
      double total = 0.0;
      for (double x : cell) total += x;
      double mean = total / static_cast<double>(cell.size());
      if (first || mean < best_mean || (mean == best_mean && id < best_id)) {
        best_id = id;
        best_mean = mean;
        first = false;
      }
    }
    sum += oracle_pairwise(h.at(task), base.at({best_id, task}));
  }
  return sum / static_cast<double>(tasks.size());
}

// Random loss table with deliberate ties (one-decimal rounding).
void random_table(Rng& rng, LossRow& h, LossTable& base,
                  std::vector<std::string>& tasks, std::vector<std::string>& ids) {
  size_t n_tasks = 1 + rng.index(6);
  size_t n_ids = 1 + rng.index(4);
  tasks.clear();
  ids.clear();
  for (size_t t = 0; t < n_tasks; ++t) tasks.push_back("t" + std::to_string(t));
  for (size_t b = 0; b < n_ids; ++b) ids.push_back("b" + std::to_string(b));
  auto losses = [&]() {
    std::vector<double> v(1 + rng.index(8));
    for (double& x : v) {
      x = rng.uniform();
      if (rng.uniform() < 0.4) x = std::round(x * 10.0) / 10.0;
    }
    return v;
  };
  h.clear();
  base.clear();
  for (const std::string& task : tasks) {
    h[task] = losses();
    for (const std::string& id : ids) base[{id, task}] = losses();
  }
}

EvalRecord rec(const std::string& id, const std::string& task, int run,
               RunStatus status, double loss) {
  EvalRecord r;
  r.hypothesis_id = id;
  r.task_id = task;
  r.run_index = run;
  r.status = status;
  r.loss = loss;
  return r;
}

}  // namespace

TEST_CASE("pairwise_win fixed cases") {
  CHECK(pairwise_win({0.1, 0.2}, {0.3, 0.4}) == 1.0);
  CHECK(pairwise_win({0.2}, {0.2}) == 0.0);
  CHECK(pairwise_win({0.25}, {0.2, 0.3}) == 0.5);
  CHECK(pairwise_win({0.5, 0.5}, {0.5, 0.6}) == 0.5);
  CHECK_THROWS_AS(pairwise_win({}, {0.1}), Error);
  CHECK_THROWS_AS(pairwise_win({0.1}, {}), Error);
}

TEST_CASE("pairwise_win equals the O(n^2) oracle and the complement identity") {
  Rng rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<double> a(1 + rng.index(8)), b(1 + rng.index(8));
    for (double& x : a) x = std::round(rng.uniform() * 8.0) / 8.0;
    for (double& x : b) x = std::round(rng.uniform() * 8.0) / 8.0;
    double win_ab = pairwise_win(a, b);
    double win_ba = pairwise_win(b, a);
    CHECK(win_ab == oracle_pairwise(a, b));
    CHECK(win_ba == oracle_pairwise(b, a));
    // integer complement: wins + losses + ties partition all pairs
    uint64_t n = a.size() * b.size();
    uint64_t wins = static_cast<uint64_t>(
        std::llround(win_ab * static_cast<double>(n)));
    uint64_t losses = static_cast<uint64_t>(
        std::llround(win_ba * static_cast<double>(n)));
    CHECK(wins + losses + oracle_ties(a, b) == n);
    CHECK(win_ab + win_ba +
              static_cast<double>(oracle_ties(a, b)) / static_cast<double>(n) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("b_wr fixed cases") {
  std::vector<std::string> tasks = {"t1", "t2"};
  std::vector<std::string> ids = {"b1", "b2"};
  LossRow h = {{"t1", {0.1, 0.1}}, {"t2", {0.1, 0.1}}};
  LossTable dominated = {{{"b1", "t1"}, {0.5}}, {{"b2", "t1"}, {0.5}},
                         {{"b1", "t2"}, {0.5}}, {{"b2", "t2"}, {0.5}}};
  CHECK(b_wr(h, dominated, tasks, ids) == 1.0);

  LossRow same = {{"t1", {0.5}}, {"t2", {0.5}}};
  CHECK(b_wr(same, dominated, tasks, ids) == 0.0);

  LossRow mixed = {{"t1", {0.3, 0.6}}, {"t2", {0.55, 0.2}}};
  CHECK(b_wr(mixed, dominated, tasks, ids) ==
        oracle_b_wr(mixed, dominated, tasks, ids));
}

TEST_CASE("bsota_wr fixed cases") {
  std::vector<std::string> tasks = {"t"};
  std::vector<std::string> ids = {"b1", "b2"};
  LossTable base = {{{"b1", "t"}, {0.2, 0.4}}, {{"b2", "t"}, {0.5, 0.5}}};
  LossRow h = {{"t", {0.3, 0.3}}};
  CHECK(bsota_wr(h, base, tasks, ids) == 0.5);

  // equal means: lexicographically smaller id wins the sota slot
  LossTable tied = {{{"b1", "t"}, {0.3}}, {{"b2", "t"}, {0.1, 0.5}}};
  LossRow h2 = {{"t", {0.2}}};
  CHECK(bsota_wr(h2, tied, tasks, ids) == 1.0);

  LossRow dominator = {{"t", {0.01}}};
  CHECK(bsota_wr(dominator, base, tasks, ids) == 1.0);
}

TEST_CASE("strict ops demand every cell") {
  std::vector<std::string> tasks = {"t1", "t2"};
  std::vector<std::string> ids = {"b1"};
  LossRow h = {{"t1", {0.1}}, {"t2", {0.1}}};
  LossTable missing = {{{"b1", "t1"}, {0.5}}};
  CHECK_THROWS_AS(b_wr(h, missing, tasks, ids), Error);
  CHECK_THROWS_AS(bsota_wr(h, missing, tasks, ids), Error);

  LossRow sparse = {{"t1", {0.1}}};
  LossTable full = {{{"b1", "t1"}, {0.5}}, {{"b1", "t2"}, {0.5}}};
  CHECK_THROWS_AS(b_wr(sparse, full, tasks, ids), Error);
  CHECK_THROWS_AS(b_wr(h, full, {}, ids), Error);
}

TEST_CASE("b_wr and bsota_wr match the oracle on random tables") {
  Rng rng(777);
  for (int trial = 0; trial < 300; ++trial) {
    LossRow h;
    LossTable base;
    std::vector<std::string> tasks, ids;
    random_table(rng, h, base, tasks, ids);
    CHECK(b_wr(h, base, tasks, ids) == oracle_b_wr(h, base, tasks, ids));
    CHECK(bsota_wr(h, base, tasks, ids) == oracle_bsota(h, base, tasks, ids));
  }
}

TEST_CASE("win rates are invariant under increasing affine loss transforms") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    LossRow h;
    LossTable base;
    std::vector<std::string> tasks, ids;
    random_table(rng, h, base, tasks, ids);
    LossRow h2 = h;
    LossTable base2 = base;
    auto scale = [](std::vector<double>& v) {
      for (double& x : v) x = 2.5 * x + 7.0;
    };
    for (auto& [task, v] : h2) scale(v);
    for (auto& [key, v] : base2) scale(v);
    CHECK(b_wr(h, base, tasks, ids) == b_wr(h2, base2, tasks, ids));
    CHECK(bsota_wr(h, base, tasks, ids) == bsota_wr(h2, base2, tasks, ids));
  }
}

TEST_CASE("summarize builds tables from ok records only") {
  std::vector<EvalRecord> h_recs = {
      rec("h", "t1", 1, RunStatus::Ok, 0.1),
      rec("h", "t1", 2, RunStatus::NonFinite, 999.0),
      rec("h", "t1", 3, RunStatus::Ok, 0.2),
      rec("h", "t2", 1, RunStatus::Ok, 0.3),
      rec("h", "t2", 2, RunStatus::ValidatorRejected, 0.0),
  };
  std::vector<EvalRecord> b_recs = {
      rec("b1", "t1", 1, RunStatus::Ok, 0.4), rec("b1", "t2", 1, RunStatus::Ok, 0.2),
      rec("b2", "t1", 1, RunStatus::Ok, 0.5), rec("b2", "t2", 1, RunStatus::Ok, 0.6),
  };
  RewardSummary s = summarize("h", h_recs, b_recs);
  CHECK(s.hypothesis_id == "h");
  CHECK(s.coverage == 1.0);
  CHECK(s.reward == s.b_wr + s.bsota_wr);

  LossRow h = {{"t1", {0.1, 0.2}}, {"t2", {0.3}}};
  LossTable base = {{{"b1", "t1"}, {0.4}}, {{"b1", "t2"}, {0.2}},
                    {{"b2", "t1"}, {0.5}}, {{"b2", "t2"}, {0.6}}};
  CHECK(s.b_wr == b_wr(h, base, {"t1", "t2"}, {"b1", "b2"}));
  CHECK(s.bsota_wr == bsota_wr(h, base, {"t1", "t2"}, {"b1", "b2"}));

  // failed runs contribute nothing
  std::vector<EvalRecord> clean = {h_recs[0], h_recs[2], h_recs[3]};
  RewardSummary s2 = summarize("h", clean, b_recs);
  CHECK(s2.b_wr == s.b_wr);
  CHECK(s2.bsota_wr == s.bsota_wr);
  CHECK(s2.coverage == s.coverage);
}

TEST_CASE("summarize is lenient about missing cells and reports coverage") {
  std::vector<EvalRecord> h_recs = {rec("h", "t1", 1, RunStatus::Ok, 0.45)};
  std::vector<EvalRecord> b_recs = {
      rec("b1", "t1", 1, RunStatus::Ok, 0.4),
      rec("b2", "t1", 1, RunStatus::Ok, 0.5),
      rec("b1", "t2", 1, RunStatus::Ok, 0.2),
      // b2 never ran t2, h never ran t2
  };
  RewardSummary s = summarize("h", h_recs, b_recs);
  // grid is 2 tasks x 2 baselines; only (t1, b1) and (t1, b2) usable
  CHECK(s.coverage == 0.5);
  CHECK(s.b_wr == 0.5);       // loses to b1, beats b2
  CHECK(s.bsota_wr == 0.0);   // t1 sota is b1 (0.4)
  CHECK(s.reward == 0.5);
}

TEST_CASE("summarize does not depend on record order") {
  Rng rng(8);
  std::vector<EvalRecord> h_recs, b_recs;
  for (int t = 0; t < 3; ++t) {
    for (int i = 1; i <= 4; ++i) {
      h_recs.push_back(rec("h", "t" + std::to_string(t), i, RunStatus::Ok,
                           rng.uniform()));
      for (const char* b : {"b1", "b2", "b3"}) {
        b_recs.push_back(rec(b, "t" + std::to_string(t), i, RunStatus::Ok,
                             rng.uniform()));
      }
    }
  }
  RewardSummary s1 = summarize("h", h_recs, b_recs);
  std::mt19937 shuf(99);
  std::shuffle(h_recs.begin(), h_recs.end(), shuf);
  std::shuffle(b_recs.begin(), b_recs.end(), shuf);
  RewardSummary s2 = summarize("h", h_recs, b_recs);
  CHECK(s1.b_wr == s2.b_wr);
  CHECK(s1.bsota_wr == s2.bsota_wr);
  CHECK(s1.reward == s2.reward);
  CHECK(s1.coverage == s2.coverage);
}

TEST_CASE("summarize error cases") {
  std::vector<EvalRecord> b_recs = {rec("b1", "t1", 1, RunStatus::Ok, 0.4)};
  std::vector<EvalRecord> dead = {rec("h", "t1", 1, RunStatus::NonFinite, 0.0)};
  CHECK_THROWS_AS(summarize("h", dead, b_recs), Error);
  CHECK_THROWS_AS(summarize("h", {rec("h", "t1", 1, RunStatus::Ok, 0.4)}, {}),
                  Error);
  // no shared cell: h ran only a task the baselines never saw
  std::vector<EvalRecord> other = {rec("h", "t9", 1, RunStatus::Ok, 0.4)};
  CHECK_THROWS_AS(summarize("h", other, b_recs), Error);
}

TEST_CASE("reward is the exact sum of the two win rates") {
  CHECK(0.515 + 0.2501 == doctest::Approx(0.7651).epsilon(1e-12));
  Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EvalRecord> h_recs, b_recs;
    for (int t = 0; t < 2; ++t) {
      for (int i = 1; i <= 3; ++i) {
        h_recs.push_back(rec("h", "t" + std::to_string(t), i, RunStatus::Ok,
                             rng.uniform()));
        b_recs.push_back(rec("b", "t" + std::to_string(t), i, RunStatus::Ok,
                             rng.uniform()));
      }
    }
    RewardSummary s = summarize("h", h_recs, b_recs);
    CHECK(s.reward == s.b_wr + s.bsota_wr);
    CHECK(s.b_wr >= 0.0);
    CHECK(s.b_wr <= 1.0);
    CHECK(s.bsota_wr >= 0.0);
    CHECK(s.bsota_wr <= 1.0);
  }
}
