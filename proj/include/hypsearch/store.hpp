#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypsearch/evaluator.hpp"
#include "hypsearch/reward.hpp"
#include "hypsearch/validator.hpp"

namespace hypsearch {

inline constexpr std::string_view kToolVersion = "hypsearch 0.1.0";

// One generated candidate, persisted verbatim before anything judges it.
// id is the sha256 of the canonical text, or of the raw text when it does
// not parse.
struct HypothesisRecord {
  std::string id;
  std::string kind;
  std::string prompt_style;
  std::string source;
  std::string raw_text;
  std::optional<std::string> canonical_text;
  ValidationReport validator_report;
};

struct ScoreRecord {
  std::string hypothesis_id;
  std::string ranker_id;
  double score = 0.0;
};

// Lines that do not parse as records; loads skip and count them.
struct LoadStats {
  size_t corrupt = 0;
  std::vector<size_t> lines;  // 1-based
};

// Append-only JSONL stores under one run directory. Loads sort: hypotheses
// by id, evals by (hypothesis id, task, run index), rewards by id, scores
// by (hypothesis id, ranker id).
class Store {
 public:
  explicit Store(std::string run_dir);  // creates the directory

  void append_hypothesis(const HypothesisRecord& record);
  void append_eval(const EvalRecord& record);
  void append_reward(const RewardSummary& record);
  void append_score(const ScoreRecord& record);

  std::vector<HypothesisRecord> load_hypotheses(LoadStats* stats = nullptr) const;
  std::vector<EvalRecord> load_evals(LoadStats* stats = nullptr) const;
  std::vector<RewardSummary> load_rewards(LoadStats* stats = nullptr) const;
  std::vector<ScoreRecord> load_scores(LoadStats* stats = nullptr) const;

  const std::string& dir() const { return dir_; }
  std::string path_of(std::string_view store_file) const;

 private:
  std::string dir_;
};

// manifest.json: run identity, config snapshot, seeds, dataset checksums,
// and stage flags. created_at is the only field excluded from byte
// comparisons between reruns.
struct RunManifest {
  std::string run_id;
  std::string created_at;
  std::string tool_version = std::string(kToolVersion);
  uint64_t master_seed = 0;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> dataset_checksums;
  std::map<std::string, bool> stages;
};

void save_manifest(const Store& store, const RunManifest& manifest);
// MissingFile when absent; CorruptRecord when unreadable.
RunManifest load_manifest(const Store& store);
bool manifest_exists(const Store& store);

}  // namespace hypsearch
