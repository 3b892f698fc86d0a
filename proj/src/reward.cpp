#include "hypsearch/reward.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hypsearch/error.hpp"

namespace hypsearch {

namespace {

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

const std::vector<double>& cell_or_throw(const LossTable& table,
                                         const std::string& id,
                                         const std::string& task) {
  auto it = table.find({id, task});
  if (it == table.end() || it->second.empty()) {
    throw Error(Errc::MissingCell, "no runs for (" + id + ", " + task + ")");
  }
  return it->second;
}

const std::vector<double>& row_cell_or_throw(const LossRow& h,
                                             const std::string& task) {
  auto it = h.find(task);
  if (it == h.end() || it->second.empty()) {
    throw Error(Errc::MissingCell, "hypothesis has no runs for " + task);
  }
  return it->second;
}

}  // namespace

double pairwise_win(const std::vector<double>& h_losses,
                    const std::vector<double>& b_losses) {
  if (h_losses.empty() || b_losses.empty()) {
    throw Error(Errc::EmptyInput, "pairwise_win needs non-empty loss runs");
  }
  std::vector<double> hs = h_losses;
  std::vector<double> bs = b_losses;
  std::sort(hs.begin(), hs.end());
  std::sort(bs.begin(), bs.end());
  uint64_t wins = 0;
  size_t below = 0;
  for (double c : bs) {
    while (below < hs.size() && hs[below] < c) ++below;
    wins += below;
  }
  return static_cast<double>(wins) /
         (static_cast<double>(hs.size()) * static_cast<double>(bs.size()));
}

double b_wr(const LossRow& h, const LossTable& baselines,
            const std::vector<std::string>& tasks,
            const std::vector<std::string>& baseline_ids) {
  if (tasks.empty() || baseline_ids.empty()) {
    throw Error(Errc::EmptyInput, "b_wr needs tasks and baselines");
  }
  double sum = 0.0;
  for (const std::string& task : tasks) {
    const std::vector<double>& h_cell = row_cell_or_throw(h, task);
    for (const std::string& id : baseline_ids) {
      sum += pairwise_win(h_cell, cell_or_throw(baselines, id, task));
    }
  }
  return sum / static_cast<double>(tasks.size() * baseline_ids.size());
}

double bsota_wr(const LossRow& h, const LossTable& baselines,
                const std::vector<std::string>& tasks,
                const std::vector<std::string>& baseline_ids) {
  if (tasks.empty() || baseline_ids.empty()) {
    throw Error(Errc::EmptyInput, "bsota_wr needs tasks and baselines");
  }
  double sum = 0.0;
  for (const std::string& task : tasks) {
    const std::vector<double>& h_cell = row_cell_or_throw(h, task);
    const std::vector<double>* best = nullptr;
    const std::string* best_id = nullptr;
    double best_mean = 0.0;
    for (const std::string& id : baseline_ids) {
      const std::vector<double>& cell = cell_or_throw(baselines, id, task);
      double mean = mean_of(cell);
      if (best == nullptr || mean < best_mean ||
          (mean == best_mean && id < *best_id)) {
        best = &cell;
        best_id = &id;
        best_mean = mean;
      }
    }
    sum += pairwise_win(h_cell, *best);
  }
  return sum / static_cast<double>(tasks.size());
}

LossTable loss_table(const std::vector<EvalRecord>& records) {
  LossTable table;
  for (const EvalRecord& r : records) {
    if (r.status == RunStatus::Ok && std::isfinite(r.loss)) {
      table[{r.hypothesis_id, r.task_id}].push_back(r.loss);
    }
  }
  return table;
}

RewardSummary summarize(const std::string& hypothesis_id,
                        const std::vector<EvalRecord>& records,
                        const std::vector<EvalRecord>& baseline_records) {
  LossRow h_row;
  for (const EvalRecord& r : records) {
    if (r.hypothesis_id == hypothesis_id && r.status == RunStatus::Ok &&
        std::isfinite(r.loss)) {
      h_row[r.task_id].push_back(r.loss);
    }
  }
  // sorted runs make every downstream sum independent of record order
  for (auto& [task, losses] : h_row) std::sort(losses.begin(), losses.end());

  LossTable base = loss_table(baseline_records);
  for (auto& [key, losses] : base) std::sort(losses.begin(), losses.end());

  std::set<std::string> tasks, ids;
  for (const EvalRecord& r : baseline_records) {
    tasks.insert(r.task_id);
    ids.insert(r.hypothesis_id);
  }
  if (h_row.empty()) {
    throw Error(Errc::NoSuccessfulRuns,
                hypothesis_id + " has no successful runs");
  }
  if (tasks.empty() || ids.empty()) {
    throw Error(Errc::NoSuccessfulRuns, "no baseline runs to compare against");
  }

  // b_wr over usable cells only
  double b_sum = 0.0;
  size_t usable = 0;
  for (const std::string& task : tasks) {
    auto hit = h_row.find(task);
    if (hit == h_row.end()) continue;
    for (const std::string& id : ids) {
      auto bit = base.find({id, task});
      if (bit == base.end() || bit->second.empty()) continue;
      b_sum += pairwise_win(hit->second, bit->second);
      ++usable;
    }
  }
  if (usable == 0) {
    throw Error(Errc::NoSuccessfulRuns,
                hypothesis_id + " shares no populated cell with the baselines");
  }

  // bsota over tasks that have both a hypothesis cell and baseline data
  double s_sum = 0.0;
  size_t s_tasks = 0;
  for (const std::string& task : tasks) {
    auto hit = h_row.find(task);
    if (hit == h_row.end()) continue;
    const std::vector<double>* best = nullptr;
    const std::string* best_id = nullptr;
    double best_mean = 0.0;
    for (const std::string& id : ids) {
      auto bit = base.find({id, task});
      if (bit == base.end() || bit->second.empty()) continue;
      double mean = mean_of(bit->second);
      if (best == nullptr || mean < best_mean ||
          (mean == best_mean && id < *best_id)) {
        best = &bit->second;
        best_id = &id;
        best_mean = mean;
      }
    }
    if (best == nullptr) continue;
    s_sum += pairwise_win(hit->second, *best);
    ++s_tasks;
  }

  RewardSummary summary;
  summary.hypothesis_id = hypothesis_id;
  summary.b_wr = b_sum / static_cast<double>(usable);
  summary.bsota_wr = s_sum / static_cast<double>(s_tasks);
  summary.reward = summary.b_wr + summary.bsota_wr;
  summary.coverage =
      static_cast<double>(usable) / static_cast<double>(tasks.size() * ids.size());
  return summary;
}

}  // namespace hypsearch
