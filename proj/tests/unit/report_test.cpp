#include <sstream>

#include "doctest.h"
#include "hypsearch/error.hpp"
#include "hypsearch/report.hpp"
#include "hypsearch/selection.hpp"

using namespace hypsearch;

namespace {

HypothesisRecord hyp(const std::string& id, const std::string& kind,
                     const std::string& style, bool passed,
                     const std::string& source = "corpus") {
  HypothesisRecord r;
  r.id = id;
  r.kind = kind;
  r.prompt_style = style;
  r.source = source;
  r.raw_text = "text";
  if (passed) r.canonical_text = "text";
  r.validator_report.passed = passed;
  return r;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("report: aggregates per (kind, style) cell") {
  std::vector<HypothesisRecord> hyps = {
      hyp("a1", "activation", "NEP", true),
      hyp("a2", "activation", "NEP", true),
      hyp("a3", "activation", "NEP", false),
      hyp("a4", "activation", "NEP", false),
      hyp("i1", "activation", "IEP", true),
      hyp("p1", "preprocessor", "NEP", true),
      hyp("b1", "activation", "builtin", true, "builtin"),  // excluded
  };
  std::vector<RewardSummary> rewards = {
      {"a1", 0.5, 0.25, 0.75, 1.0},
      {"a2", 1.0, 0.75, 1.75, 1.0},
      {"i1", 0.25, 0.25, 0.5, 1.0},
      {"zz", 0.9, 0.9, 1.8, 1.0},  // unknown id, skipped
  };

  ReportTable table = build_report(hyps, rewards);
  REQUIRE(table.rows.size() == 3);  // sorted by (kind, style)

  const ReportRow& iep = table.rows[0];
  CHECK(iep.kind == "activation");
  CHECK(iep.style == "IEP");
  CHECK(iep.hypotheses == 1);
  CHECK(iep.validator_pr == 1.0);
  CHECK(iep.rewarded == 1);
  CHECK(iep.mean_b_wr == 0.25);

  const ReportRow& nep = table.rows[1];
  CHECK(nep.style == "NEP");
  CHECK(nep.hypotheses == 4);
  CHECK(nep.validator_pr == 0.5);
  CHECK(nep.rewarded == 2);
  CHECK(nep.mean_b_wr == 0.75);       // (0.5 + 1.0) / 2
  CHECK(nep.mean_bsota_wr == 0.5);    // (0.25 + 0.75) / 2

  const ReportRow& pre = table.rows[2];
  CHECK(pre.kind == "preprocessor");
  CHECK(pre.hypotheses == 1);
  CHECK(pre.rewarded == 0);
  CHECK(pre.mean_b_wr == 0.0);
}

TEST_CASE("report: no reward summaries is an error") {
  std::vector<HypothesisRecord> hyps = {hyp("a1", "activation", "NEP", true)};
  try {
    build_report(hyps, {});
    FAIL("expected NoEvaluations");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoEvaluations);
    CHECK(std::string(e.what()).find("no evaluations") != std::string::npos);
  }
}

TEST_CASE("report: text table is aligned and ruled") {
  std::vector<HypothesisRecord> hyps = {hyp("a1", "activation", "NEP", true)};
  std::vector<RewardSummary> rewards = {{"a1", 0.5, 0.25, 0.75, 1.0}};
  std::string text = render_report_text(build_report(hyps, rewards));
  std::vector<std::string> lines = split_lines(text);
  REQUIRE(lines.size() == 3);  // header, rule, one row
  CHECK(lines[0].find("kind") == 0);
  CHECK(lines[0].find("Validator-PR") != std::string::npos);
  CHECK(lines[0].find("mean BSOTA-WR") != std::string::npos);
  CHECK(lines[1].find_first_not_of('-') == std::string::npos);
  CHECK(lines[2].find("activation") == 0);
  CHECK(lines[2].find("0.5000") != std::string::npos);
  CHECK(lines[2].find("0.2500") != std::string::npos);
  for (const std::string& line : lines) {
    CHECK(line.back() != ' ');  // no trailing padding
  }
}

TEST_CASE("report: csv round-trips the table values") {
  std::vector<HypothesisRecord> hyps = {
      hyp("a1", "activation", "NEP", true),
      hyp("a2", "activation", "NEP", false),
  };
  std::vector<RewardSummary> rewards = {{"a1", 0.625, 0.125, 0.75, 1.0}};
  std::string csv = render_report_csv(build_report(hyps, rewards));
  std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "kind,style,hypotheses,validator_pr,rewarded,mean_b_wr,mean_bsota_wr");
  CHECK(lines[1] == "activation,NEP,2,0.5,1,0.625,0.125");
}

TEST_CASE("report: scatter csv lists one row per summary") {
  std::vector<RewardSummary> rewards = {{"h1", 0.5, 0.25, 0.75, 1.0},
                                        {"h2", 1.0, 0.0, 1.0, 1.0}};
  std::vector<std::string> lines = split_lines(render_scatter_csv(rewards));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "hypothesis_id,b_wr,bsota_wr");
  CHECK(lines[1] == "h1,0.5,0.25");
  CHECK(lines[2] == "h2,1,0");
}

TEST_CASE("report: efficiency csv starts t at 1") {
  EfficiencyCurve curve;
  curve.ordering_id = "test";
  curve.y = {1.0, 1.5, 1.75};
  std::vector<std::string> lines = split_lines(render_efficiency_csv(curve));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "t,y");
  CHECK(lines[1] == "1,1");
  CHECK(lines[2] == "2,1.5");
  CHECK(lines[3] == "3,1.75");
}

TEST_CASE("report: similarity csv is a labeled square matrix") {
  DiverseCandidate a{"a", 1.0, {1.0, 0.0}};
  DiverseCandidate b{"b", 0.5, {0.0, 1.0}};
  DiversitySelection sel = greedy_diverse_select({a, b}, 2, 1.0);
  std::string csv = render_similarity_csv(sel);
  std::vector<std::string> lines = split_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "id,a,b");
  CHECK(lines[1].rfind("a,", 0) == 0);
  CHECK(lines[2].rfind("b,", 0) == 0);
  CHECK(lines[1] == "a,1,0");
  CHECK(lines[2] == "b,0,1");
}

TEST_CASE("report: csv fields are quoted per RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("") == "");
  CHECK(csv_field("with,comma") == "\"with,comma\"");
  CHECK(csv_field("with \"quote\"") == "\"with \"\"quote\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_field("cr\rhere") == "\"cr\rhere\"");
}
