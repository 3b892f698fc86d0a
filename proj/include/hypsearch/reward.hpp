#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypsearch/evaluator.hpp"

namespace hypsearch {

// (subject id, task id) -> finite per-run losses.
using LossTable =
    std::map<std::pair<std::string, std::string>, std::vector<double>>;
// task id -> finite per-run losses for one subject.
using LossRow = std::map<std::string, std::vector<double>>;

struct RewardSummary {
  std::string hypothesis_id;
  double b_wr = 0.0;
  double bsota_wr = 0.0;
  double reward = 0.0;  // exact sum b_wr + bsota_wr
  double coverage = 0.0;  // fraction of (task, baseline) cells with data
};

// Fraction of ordered pairs (a in h_losses, c in b_losses) with a < c,
// strict. Exact rational wins / (|h| * |b|). Throws EmptyInput.
double pairwise_win(const std::vector<double>& h_losses,
                    const std::vector<double>& b_losses);

// Unweighted mean of pairwise_win over every (task, baseline) cell.
// Throws MissingCell when any cell (or the hypothesis row for a task)
// is absent or empty.
double b_wr(const LossRow& h, const LossTable& baselines,
            const std::vector<std::string>& tasks,
            const std::vector<std::string>& baseline_ids);

// Per task: the baseline with minimal mean loss (ties -> lexicographically
// smallest id), pairwise_win against its runs; unweighted mean over tasks.
double bsota_wr(const LossRow& h, const LossTable& baselines,
                const std::vector<std::string>& tasks,
                const std::vector<std::string>& baseline_ids);

// Loss tables from ok records only (non-finite and rejected runs dropped).
LossTable loss_table(const std::vector<EvalRecord>& records);

// Lenient scoring over whatever cells have data; the task grid and the
// baseline set are taken from the baseline records. Coverage reports the
// usable-cell fraction. Throws NoSuccessfulRuns when nothing is comparable.
RewardSummary summarize(const std::string& hypothesis_id,
                        const std::vector<EvalRecord>& records,
                        const std::vector<EvalRecord>& baseline_records);

}  // namespace hypsearch
