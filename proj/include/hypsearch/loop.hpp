#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hypsearch/ast.hpp"
#include "hypsearch/evaluator.hpp"
#include "hypsearch/generate.hpp"
#include "hypsearch/ranker.hpp"
#include "hypsearch/selection.hpp"
#include "hypsearch/store.hpp"

namespace hypsearch {

// Everything one run needs; every field has the shipped default so a config
// file only lists deviations.
struct LoopConfig {
  ComponentKind kind = ComponentKind::Activation;
  PromptStyle style = PromptStyle::NEP;
  std::string source = "corpus";  // corpus | random | llm
  std::string corpus_path = "corpora/activation_demo.txt";
  size_t batch_size = 20;  // N generated per iteration
  size_t top_k = 20;       // iteration-2 pruning width
  ProtocolConfig protocol;
  std::vector<std::string> tasks = {"breast-cancer-cls", "diabetes-reg",
                                    "iris-cls", "wine-cls", "wine-reg"};
  std::string data_dir = "data";
  std::string prompts_dir = "prompts";
  size_t shuffles = 100;  // S for the random baseline curve
  double alpha = 0.5;     // diversity weight
  size_t window = 50;     // W
  CurveAggregate aggregate = CurveAggregate::Sum;
  NScoreMode n_score_mode = NScoreMode::MeanDistance;
  RankerConfig ranker;
  uint64_t master_seed = 20260817;
  size_t jobs = 1;
  // remote generator
  std::string llm_base_url;
  std::string llm_model = "local-test";
  std::string llm_api_key_env = "HYPSEARCH_API_KEY";
  double temperature = 1.0;
  int max_retries = 2;
};

// Defaults overridden by the flat config document; InvalidConfig on bad
// values or an unknown enum spelling.
LoopConfig load_loop_config(const std::string& path);
LoopConfig loop_config_from_map(const std::map<std::string, std::string>& values);
// The full key set with this config's values, for the manifest snapshot.
std::map<std::string, std::string> loop_config_to_map(const LoopConfig& config);

struct LoopResult {
  size_t generated = 0;
  size_t valid = 0;
  size_t duplicates = 0;
  size_t evaluated = 0;   // hypotheses fully evaluated (incl. baselines)
  size_t summarized = 0;  // reward summaries written
  size_t scored = 0;      // iteration 2 only
};

// Iteration 1, brute force: generate N -> validate -> dedupe -> evaluate
// every valid candidate on all tasks x R seeds -> summarize rewards.
// Persists as it goes; skips anything the store already holds, so an
// interrupted run resumes to the identical final state.
LoopResult run_iteration1(const LoopConfig& config, Store& store);

// Iteration 2: same front half, then scores all candidates with the ranker,
// fully evaluates only the top-k, and persists every score.
LoopResult run_iteration2(const LoopConfig& config, Store& store,
                          const RankerState& ranker);

// Shared plumbing, exposed for the CLI subcommands.
std::vector<RawCandidate> generate_batch(const LoopConfig& config);
HypothesisRecord judge_candidate(const RawCandidate& candidate,
                                 ComponentKind kind);
// Baseline programs for the kind, evaluated and persisted like hypotheses.
std::vector<std::string> ensure_baselines(const LoopConfig& config, Store& store);
RunManifest ensure_manifest(const LoopConfig& config, Store& store);
// Persist the generated batch if the store lacks it; returns the number of
// hypothesis records appended.
size_t persist_generation(const LoopConfig& config, Store& store);
// Sorted unique ids of stored non-builtin candidates that passed validation.
std::vector<std::string> stored_candidate_ids(const Store& store);
// Missing (id, task, run) evals appended in stable order; returns how many.
size_t evaluate_stored(const LoopConfig& config, Store& store,
                       const std::vector<std::string>& ids);
// Missing reward summaries for ids, scored against the baseline records.
size_t summarize_stored(Store& store, const std::vector<std::string>& ids,
                        const std::vector<std::string>& baseline_ids);

}  // namespace hypsearch
