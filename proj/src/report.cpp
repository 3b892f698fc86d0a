#include "hypsearch/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "hypsearch/error.hpp"

namespace hypsearch {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

ReportTable build_report(const std::vector<HypothesisRecord>& hypotheses,
                         const std::vector<RewardSummary>& rewards) {
  if (rewards.empty()) {
    throw Error(Errc::NoEvaluations,
                "no evaluations in this run directory (rewards store is empty)");
  }

  struct Cell {
    size_t texts = 0;
    size_t passed = 0;
    size_t rewarded = 0;
    double b_sum = 0.0;
    double bsota_sum = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;
  std::map<std::string, std::pair<std::string, std::string>> key_of_id;
  for (const HypothesisRecord& h : hypotheses) {
    if (h.source == "builtin") continue;
    std::pair<std::string, std::string> key{h.kind, h.prompt_style};
    Cell& cell = cells[key];
    ++cell.texts;
    cell.passed += h.validator_report.passed ? 1 : 0;
    key_of_id.emplace(h.id, key);
  }

  for (const RewardSummary& r : rewards) {
    auto it = key_of_id.find(r.hypothesis_id);
    if (it == key_of_id.end()) continue;  // baseline or foreign record
    Cell& cell = cells[it->second];
    ++cell.rewarded;
    cell.b_sum += r.b_wr;
    cell.bsota_sum += r.bsota_wr;
  }

  ReportTable table;
  for (const auto& [key, cell] : cells) {
    ReportRow row;
    row.kind = key.first;
    row.style = key.second;
    row.hypotheses = cell.texts;
    row.validator_pr =
        cell.texts == 0 ? 0.0
                        : static_cast<double>(cell.passed) /
                              static_cast<double>(cell.texts);
    row.rewarded = cell.rewarded;
    row.mean_b_wr =
        cell.rewarded == 0 ? 0.0 : cell.b_sum / static_cast<double>(cell.rewarded);
    row.mean_bsota_wr = cell.rewarded == 0
                            ? 0.0
                            : cell.bsota_sum / static_cast<double>(cell.rewarded);
    table.rows.push_back(std::move(row));
  }
  return table;  // map iteration already sorted by (kind, style)
}

std::string render_report_text(const ReportTable& table) {
  // column widths fit the widest cell so the table stays aligned
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"kind", "style", "hypotheses", "Validator-PR", "rewarded",
                  "mean B-WR", "mean BSOTA-WR"});
  for (const ReportRow& row : table.rows) {
    grid.push_back({row.kind, row.style, std::to_string(row.hypotheses),
                    fmt_fixed4(row.validator_pr), std::to_string(row.rewarded),
                    fmt_fixed4(row.mean_b_wr), fmt_fixed4(row.mean_bsota_wr)});
  }
  std::vector<size_t> widths(grid[0].size(), 0);
  for (const auto& row : grid) {
    for (size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (size_t r = 0; r < grid.size(); ++r) {
    for (size_t c = 0; c < grid[r].size(); ++c) {
      if (c > 0) out += "  ";
      out += grid[r][c];
      out.append(widths[c] - grid[r][c].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (r == 0) {
      size_t total = 0;
      for (size_t w : widths) total += w;
      out.append(total + 2 * (widths.size() - 1), '-');
      out += '\n';
    }
  }
  return out;
}

std::string render_report_csv(const ReportTable& table) {
  std::string out =
      "kind,style,hypotheses,validator_pr,rewarded,mean_b_wr,mean_bsota_wr\n";
  for (const ReportRow& row : table.rows) {
    out += csv_field(row.kind) + "," + csv_field(row.style) + "," +
           std::to_string(row.hypotheses) + "," + fmt_double(row.validator_pr) +
           "," + std::to_string(row.rewarded) + "," +
           fmt_double(row.mean_b_wr) + "," + fmt_double(row.mean_bsota_wr) +
           "\n";
  }
  return out;
}

std::string render_scatter_csv(const std::vector<RewardSummary>& rewards) {
  std::string out = "hypothesis_id,b_wr,bsota_wr\n";
  for (const RewardSummary& r : rewards) {
    out += csv_field(r.hypothesis_id) + "," + fmt_double(r.b_wr) + "," +
           fmt_double(r.bsota_wr) + "\n";
  }
  return out;
}

std::string render_efficiency_csv(const EfficiencyCurve& curve) {
  std::string out = "t,y\n";
  for (size_t t = 0; t < curve.y.size(); ++t) {
    out += std::to_string(t + 1) + "," + fmt_double(curve.y[t]) + "\n";
  }
  return out;
}

std::string render_similarity_csv(const DiversitySelection& selection) {
  std::string out = "id";
  for (const std::string& id : selection.ids) out += "," + csv_field(id);
  out += "\n";
  for (size_t r = 0; r < selection.ids.size(); ++r) {
    out += csv_field(selection.ids[r]);
    for (size_t c = 0; c < selection.ids.size(); ++c) {
      out += "," + fmt_double(selection.similarity[r][c]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace hypsearch
