#pragma once

#include <string>
#include <vector>

#include "hypsearch/reward.hpp"
#include "hypsearch/selection.hpp"
#include "hypsearch/store.hpp"

namespace hypsearch {

// One (kind, style) cell: pass rate over every generated text, win-rate
// means over the hypotheses that earned a reward summary.
struct ReportRow {
  std::string kind;
  std::string style;
  size_t hypotheses = 0;  // raw texts, pre-dedupe
  double validator_pr = 0.0;
  size_t rewarded = 0;
  double mean_b_wr = 0.0;
  double mean_bsota_wr = 0.0;
};

struct ReportTable {
  std::vector<ReportRow> rows;  // sorted by (kind, style)
};

// Builtin components are excluded from the table. Throws NoEvaluations
// when there are no reward summaries at all.
ReportTable build_report(const std::vector<HypothesisRecord>& hypotheses,
                         const std::vector<RewardSummary>& rewards);

std::string render_report_text(const ReportTable& table);
std::string render_report_csv(const ReportTable& table);
// (hypothesis_id, b_wr, bsota_wr) rows for scatter plotting.
std::string render_scatter_csv(const std::vector<RewardSummary>& rewards);

// (t, y_t) rows, t starting at 1.
std::string render_efficiency_csv(const EfficiencyCurve& curve);
// Dense cosine matrix with an id header row and id row labels.
std::string render_similarity_csv(const DiversitySelection& selection);

// RFC 4180: quotes a field when it holds a comma, quote, or newline.
std::string csv_field(const std::string& value);

}  // namespace hypsearch
