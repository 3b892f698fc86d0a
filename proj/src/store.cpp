#include "hypsearch/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hypsearch/error.hpp"

namespace hypsearch {

namespace {

using ordered_json = nlohmann::ordered_json;

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path + " for append");
  }
  out << line << '\n';
  if (!out) {
    throw Error(Errc::IoError, "short write to " + path);
  }
}

// Applies `parse_one` per line, skipping and counting lines it rejects.
template <typename Record, typename ParseOne>
std::vector<Record> load_jsonl(const std::string& path, LoadStats* stats,
                               ParseOne parse_one) {
  std::vector<Record> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;  // an absent store is an empty store
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ordered_json row = ordered_json::parse(line, nullptr, false);
    bool ok = !row.is_discarded() && row.is_object();
    if (ok) {
      try {
        records.push_back(parse_one(row));
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok && stats != nullptr) {
      ++stats->corrupt;
      stats->lines.push_back(line_no);
    }
  }
  return records;
}

ordered_json report_to_json(const ValidationReport& report) {
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return {{"passed", report.passed}, {"checks", std::move(checks)}};
}

ValidationReport report_from_json(const ordered_json& j) {
  ValidationReport report;
  report.passed = j.at("passed").get<bool>();
  for (const ordered_json& c : j.at("checks")) {
    CheckResult r;
    r.name = c.at("name").get<std::string>();
    r.passed = c.at("passed").get<bool>();
    r.detail = c.at("detail").get<std::string>();
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace

Store::Store(std::string run_dir) : dir_(std::move(run_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(Errc::IoError, "cannot create " + dir_ + ": " + ec.message());
  }
}

std::string Store::path_of(std::string_view store_file) const {
  return dir_ + "/" + std::string(store_file);
}

void Store::append_hypothesis(const HypothesisRecord& record) {
  ordered_json row = {
      {"id", record.id},
      {"kind", record.kind},
      {"prompt_style", record.prompt_style},
      {"source", record.source},
      {"raw_text", record.raw_text},
  };
  if (record.canonical_text.has_value()) {
    row["canonical_text"] = *record.canonical_text;
  }
  row["validator_report"] = report_to_json(record.validator_report);
  append_line(path_of("hypotheses.jsonl"), row.dump());
}

void Store::append_eval(const EvalRecord& record) {
  ordered_json row = {
      {"hypothesis_id", record.hypothesis_id},
      {"task", record.task_id},
      {"run_index", record.run_index},
      {"seed", record.run_seed},
      {"status", std::string(run_status_name(record.status))},
  };
  if (record.status == RunStatus::Ok) {
    row["loss"] = record.loss;
  }
  append_line(path_of("evals.jsonl"), row.dump());
}

void Store::append_reward(const RewardSummary& record) {
  ordered_json row = {
      {"hypothesis_id", record.hypothesis_id},
      {"b_wr", record.b_wr},
      {"bsota_wr", record.bsota_wr},
      {"reward", record.reward},
      {"coverage", record.coverage},
  };
  append_line(path_of("rewards.jsonl"), row.dump());
}

void Store::append_score(const ScoreRecord& record) {
  ordered_json row = {
      {"hypothesis_id", record.hypothesis_id},
      {"ranker_id", record.ranker_id},
      {"score", record.score},
  };
  append_line(path_of("scores.jsonl"), row.dump());
}

std::vector<HypothesisRecord> Store::load_hypotheses(LoadStats* stats) const {
  auto records = load_jsonl<HypothesisRecord>(
      path_of("hypotheses.jsonl"), stats, [](const ordered_json& row) {
        HypothesisRecord r;
        r.id = row.at("id").get<std::string>();
        r.kind = row.at("kind").get<std::string>();
        r.prompt_style = row.at("prompt_style").get<std::string>();
        r.source = row.at("source").get<std::string>();
        r.raw_text = row.at("raw_text").get<std::string>();
        if (row.contains("canonical_text")) {
          r.canonical_text = row.at("canonical_text").get<std::string>();
        }
        r.validator_report = report_from_json(row.at("validator_report"));
        return r;
      });
  std::stable_sort(records.begin(), records.end(),
                   [](const HypothesisRecord& a, const HypothesisRecord& b) {
                     return a.id < b.id;
                   });
  return records;
}

std::vector<EvalRecord> Store::load_evals(LoadStats* stats) const {
  auto records = load_jsonl<EvalRecord>(
      path_of("evals.jsonl"), stats, [](const ordered_json& row) {
        EvalRecord r;
        r.hypothesis_id = row.at("hypothesis_id").get<std::string>();
        r.task_id = row.at("task").get<std::string>();
        r.run_index = row.at("run_index").get<int>();
        r.run_seed = row.at("seed").get<uint64_t>();
        r.status = run_status_from_name(row.at("status").get<std::string>());
        r.loss = row.contains("loss") ? row.at("loss").get<double>() : 0.0;
        return r;
      });
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return std::tie(a.hypothesis_id, a.task_id, a.run_index) <
                     std::tie(b.hypothesis_id, b.task_id, b.run_index);
            });
  return records;
}

std::vector<RewardSummary> Store::load_rewards(LoadStats* stats) const {
  auto records = load_jsonl<RewardSummary>(
      path_of("rewards.jsonl"), stats, [](const ordered_json& row) {
        RewardSummary r;
        r.hypothesis_id = row.at("hypothesis_id").get<std::string>();
        r.b_wr = row.at("b_wr").get<double>();
        r.bsota_wr = row.at("bsota_wr").get<double>();
        r.reward = row.at("reward").get<double>();
        r.coverage = row.at("coverage").get<double>();
        return r;
      });
  std::stable_sort(records.begin(), records.end(),
                   [](const RewardSummary& a, const RewardSummary& b) {
                     return a.hypothesis_id < b.hypothesis_id;
                   });
  return records;
}

std::vector<ScoreRecord> Store::load_scores(LoadStats* stats) const {
  auto records = load_jsonl<ScoreRecord>(
      path_of("scores.jsonl"), stats, [](const ordered_json& row) {
        ScoreRecord r;
        r.hypothesis_id = row.at("hypothesis_id").get<std::string>();
        r.ranker_id = row.at("ranker_id").get<std::string>();
        r.score = row.at("score").get<double>();
        return r;
      });
  std::sort(records.begin(), records.end(),
            [](const ScoreRecord& a, const ScoreRecord& b) {
              return std::tie(a.hypothesis_id, a.ranker_id) <
                     std::tie(b.hypothesis_id, b.ranker_id);
            });
  return records;
}

void save_manifest(const Store& store, const RunManifest& manifest) {
  ordered_json j = {
      {"run_id", manifest.run_id},
      {"created_at", manifest.created_at},
      {"tool_version", manifest.tool_version},
      {"master_seed", manifest.master_seed},
  };
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : manifest.config) j["config"][k] = v;
  j["dataset_checksums"] = ordered_json::object();
  for (const auto& [k, v] : manifest.dataset_checksums) {
    j["dataset_checksums"][k] = v;
  }
  j["stages"] = ordered_json::object();
  for (const auto& [k, v] : manifest.stages) j["stages"][k] = v;

  std::ofstream out(store.path_of("manifest.json"), std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot write manifest");
  }
  out << j.dump(2) << '\n';
}

bool manifest_exists(const Store& store) {
  return std::filesystem::exists(store.path_of("manifest.json"));
}

RunManifest load_manifest(const Store& store) {
  std::ifstream in(store.path_of("manifest.json"), std::ios::binary);
  if (!in) {
    throw Error(Errc::MissingFile, "no manifest in " + store.dir());
  }
  std::ostringstream body;
  body << in.rdbuf();
  ordered_json j = ordered_json::parse(body.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::CorruptRecord, "manifest.json does not parse");
  }
  try {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.master_seed = j.at("master_seed").get<uint64_t>();
    for (const auto& [k, v] : j.at("config").items()) {
      m.config[k] = v.get<std::string>();
    }
    for (const auto& [k, v] : j.at("dataset_checksums").items()) {
      m.dataset_checksums[k] = v.get<std::string>();
    }
    for (const auto& [k, v] : j.at("stages").items()) {
      m.stages[k] = v.get<bool>();
    }
    return m;
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptRecord,
                std::string("manifest.json is missing fields: ") + e.what());
  }
}

}  // namespace hypsearch
