#include "hypsearch/loop.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <future>
#include <set>
#include <sstream>

#include "hypsearch/config.hpp"
#include "hypsearch/datasets.hpp"
#include "hypsearch/digest.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/featurize.hpp"
#include "hypsearch/parse.hpp"
#include "hypsearch/rng.hpp"
#include "hypsearch/serialize.hpp"

namespace hypsearch {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const std::string& item : items) {
    if (!out.empty()) out += ",";
    out += item;
  }
  return out;
}

ComponentKind kind_from_config(const std::string& name) {
  try {
    return kind_from_name(name);
  } catch (const Error&) {
    throw Error(Errc::InvalidConfig, "kind must be activation, preprocessor, "
                                     "or regularizer, got: " + name);
  }
}

PromptStyle style_from_config(const std::string& name) {
  try {
    return prompt_style_from_name(name);
  } catch (const Error&) {
    throw Error(Errc::InvalidConfig, "style must be IEP or NEP, got: " + name);
  }
}

}  // namespace

LoopConfig loop_config_from_map(const std::map<std::string, std::string>& values) {
  static const std::set<std::string> known = {
      "kind", "style", "source", "corpus_path", "batch_size", "top_k",
      "protocol", "learning_rate", "batch", "runs_per_task",
      "validation_fraction", "tasks", "data_dir", "prompts_dir", "shuffles",
      "alpha", "window", "efficiency_aggregate", "n_score_mode",
      "ranker_max_pairs", "ranker_step", "ranker_epochs", "master_seed",
      "jobs", "llm_base_url", "llm_model", "llm_api_key_env", "temperature",
      "max_retries"};
  for (const auto& [key, value] : values) {
    if (known.find(key) == known.end()) {
      throw Error(Errc::InvalidConfig, "unknown config key: " + key);
    }
  }

  ConfigView view{values};
  LoopConfig config;
  config.kind = kind_from_config(
      view.get_string("kind", std::string(kind_name(config.kind))));
  config.style = style_from_config(view.get_string(
      "style", std::string(prompt_style_name(config.style))));
  config.source = view.get_string("source", config.source);
  if (config.source != "corpus" && config.source != "random" &&
      config.source != "llm") {
    throw Error(Errc::InvalidConfig,
                "source must be corpus, random, or llm, got: " + config.source);
  }
  config.corpus_path = view.get_string("corpus_path", config.corpus_path);
  config.batch_size =
      static_cast<size_t>(view.get_uint("batch_size", config.batch_size));
  config.top_k = static_cast<size_t>(view.get_uint("top_k", config.top_k));
  if (config.top_k < 1) {
    throw Error(Errc::InvalidConfig, "top_k must be >= 1");
  }

  std::string protocol = view.get_string("protocol", "one-epoch");
  if (protocol == "one-epoch") {
    config.protocol.mode = ProtocolMode::OneEpoch;
  } else if (protocol == "single-step") {
    config.protocol.mode = ProtocolMode::SingleStep;
  } else {
    throw Error(Errc::InvalidConfig,
                "protocol must be one-epoch or single-step, got: " + protocol);
  }
  config.protocol.learning_rate =
      view.get_double("learning_rate", config.protocol.learning_rate);
  config.protocol.batch_size = static_cast<int>(view.get_uint(
      "batch", static_cast<uint64_t>(config.protocol.batch_size)));
  config.protocol.runs_per_task = static_cast<int>(
      view.get_uint("runs_per_task", static_cast<uint64_t>(config.protocol.runs_per_task)));
  config.protocol.validation_fraction = view.get_double(
      "validation_fraction", config.protocol.validation_fraction);

  config.tasks = view.get_list("tasks", config.tasks);
  std::sort(config.tasks.begin(), config.tasks.end());
  config.data_dir = view.get_string("data_dir", config.data_dir);
  config.prompts_dir = view.get_string("prompts_dir", config.prompts_dir);
  config.shuffles = static_cast<size_t>(view.get_uint("shuffles", config.shuffles));
  config.alpha = view.get_double("alpha", config.alpha);
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw Error(Errc::InvalidConfig, "alpha must be in [0, 1]");
  }
  config.window = static_cast<size_t>(view.get_uint("window", config.window));
  if (config.window < 1) {
    throw Error(Errc::InvalidConfig, "window must be >= 1");
  }

  std::string aggregate = view.get_string("efficiency_aggregate", "sum");
  if (aggregate == "sum") {
    config.aggregate = CurveAggregate::Sum;
  } else if (aggregate == "mean") {
    config.aggregate = CurveAggregate::Mean;
  } else {
    throw Error(Errc::InvalidConfig,
                "efficiency_aggregate must be sum or mean, got: " + aggregate);
  }
  std::string n_score = view.get_string("n_score_mode", "mean");
  if (n_score == "mean") {
    config.n_score_mode = NScoreMode::MeanDistance;
  } else if (n_score == "min") {
    config.n_score_mode = NScoreMode::MinDistance;
  } else {
    throw Error(Errc::InvalidConfig,
                "n_score_mode must be mean or min, got: " + n_score);
  }

  config.ranker.max_pairs = static_cast<size_t>(
      view.get_uint("ranker_max_pairs", config.ranker.max_pairs));
  config.ranker.step = view.get_double("ranker_step", config.ranker.step);
  config.ranker.epochs = static_cast<int>(view.get_uint(
      "ranker_epochs", static_cast<uint64_t>(config.ranker.epochs)));
  config.master_seed = view.get_uint("master_seed", config.master_seed);
  config.jobs = static_cast<size_t>(view.get_uint("jobs", config.jobs));
  if (config.jobs < 1) config.jobs = 1;

  config.llm_base_url = view.get_string("llm_base_url", config.llm_base_url);
  config.llm_model = view.get_string("llm_model", config.llm_model);
  config.llm_api_key_env =
      view.get_string("llm_api_key_env", config.llm_api_key_env);
  config.temperature = view.get_double("temperature", config.temperature);
  config.max_retries =
      static_cast<int>(view.get_int("max_retries", config.max_retries));
  return config;
}

LoopConfig load_loop_config(const std::string& path) {
  return loop_config_from_map(parse_flat_config(path));
}

std::map<std::string, std::string> loop_config_to_map(const LoopConfig& config) {
  std::map<std::string, std::string> m;
  m["kind"] = std::string(kind_name(config.kind));
  m["style"] = std::string(prompt_style_name(config.style));
  m["source"] = config.source;
  m["corpus_path"] = config.corpus_path;
  m["batch_size"] = std::to_string(config.batch_size);
  m["top_k"] = std::to_string(config.top_k);
  m["protocol"] = config.protocol.mode == ProtocolMode::OneEpoch
                      ? "one-epoch"
                      : "single-step";
  m["learning_rate"] = fmt_double(config.protocol.learning_rate);
  m["batch"] = std::to_string(config.protocol.batch_size);
  m["runs_per_task"] = std::to_string(config.protocol.runs_per_task);
  m["validation_fraction"] = fmt_double(config.protocol.validation_fraction);
  m["tasks"] = join_list(config.tasks);
  m["data_dir"] = config.data_dir;
  m["prompts_dir"] = config.prompts_dir;
  m["shuffles"] = std::to_string(config.shuffles);
  m["alpha"] = fmt_double(config.alpha);
  m["window"] = std::to_string(config.window);
  m["efficiency_aggregate"] =
      config.aggregate == CurveAggregate::Sum ? "sum" : "mean";
  m["n_score_mode"] =
      config.n_score_mode == NScoreMode::MeanDistance ? "mean" : "min";
  m["ranker_max_pairs"] = std::to_string(config.ranker.max_pairs);
  m["ranker_step"] = fmt_double(config.ranker.step);
  m["ranker_epochs"] = std::to_string(config.ranker.epochs);
  m["master_seed"] = std::to_string(config.master_seed);
  m["jobs"] = std::to_string(config.jobs);
  m["llm_base_url"] = config.llm_base_url;
  m["llm_model"] = config.llm_model;
  m["llm_api_key_env"] = config.llm_api_key_env;
  m["temperature"] = fmt_double(config.temperature);
  m["max_retries"] = std::to_string(config.max_retries);
  return m;
}

namespace {

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// The jobs knob must not leak into the run identity: the same work split
// differently is still the same run.
std::string run_id_of(const LoopConfig& config) {
  std::map<std::string, std::string> m = loop_config_to_map(config);
  m.erase("jobs");
  std::string blob;
  for (const auto& [k, v] : m) blob += k + "=" + v + "\n";
  return sha256_hex(blob).substr(0, 16);
}

void mark_stage(Store& store, RunManifest& manifest, const std::string& stage) {
  if (manifest.stages[stage]) return;
  manifest.stages[stage] = true;
  save_manifest(store, manifest);
}

struct EvalPlanItem {
  std::string hypothesis_id;
  std::string task;
  int run_index = 1;
};

// Evaluates the missing (id, task, run) triples in their stable sorted
// order. Work may fan out across jobs; the append order never does.
size_t evaluate_missing(
    const LoopConfig& config, Store& store,
    const std::vector<std::pair<std::string, HypothesisProgram>>& programs,
    const std::map<std::string, SplitData>& splits) {
  std::set<std::tuple<std::string, std::string, int>> done;
  for (const EvalRecord& r : store.load_evals()) {
    done.insert({r.hypothesis_id, r.task_id, r.run_index});
  }

  std::vector<std::pair<EvalPlanItem, const HypothesisProgram*>> todo;
  for (const auto& [id, prog] : programs) {
    for (const auto& [task, split] : splits) {
      for (int r = 1; r <= config.protocol.runs_per_task; ++r) {
        if (done.count({id, task, r}) == 0) {
          todo.push_back({{id, task, r}, &prog});
        }
      }
    }
  }
  std::sort(todo.begin(), todo.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.hypothesis_id, a.first.task, a.first.run_index) <
           std::tie(b.first.hypothesis_id, b.first.task, b.first.run_index);
  });

  size_t at = 0;
  while (at < todo.size()) {
    size_t chunk = std::min(config.jobs, todo.size() - at);
    std::vector<std::future<EvalRecord>> futures;
    futures.reserve(chunk);
    for (size_t i = 0; i < chunk; ++i) {
      const auto& [item, prog] = todo[at + i];
      futures.push_back(std::async(
          config.jobs > 1 ? std::launch::async : std::launch::deferred,
          [&config, &splits, item, prog]() {
            const SplitData& split = splits.at(item.task);
            ModelAssembly assembly = assemble(*prog, config.kind, split.spec);
            EvalRecord record = train_eval(
                assembly, split,
                run_seed(item.hypothesis_id, item.task, item.run_index),
                config.protocol);
            record.run_index = item.run_index;
            return record;
          }));
    }
    for (auto& f : futures) store.append_eval(f.get());
    at += chunk;
  }
  return todo.size();
}

std::vector<EvalRecord> evals_of(const std::vector<EvalRecord>& evals,
                                 const std::set<std::string>& ids) {
  std::vector<EvalRecord> out;
  for (const EvalRecord& r : evals) {
    if (ids.count(r.hypothesis_id) != 0) out.push_back(r);
  }
  return out;
}

// Appends reward summaries for the given ids where missing; hypotheses with
// no successful run are skipped, not failed.
size_t summarize_missing(Store& store, const std::vector<std::string>& ids,
                         const std::set<std::string>& baseline_ids) {
  std::set<std::string> have;
  for (const RewardSummary& r : store.load_rewards()) {
    have.insert(r.hypothesis_id);
  }
  std::vector<EvalRecord> evals = store.load_evals();
  std::vector<EvalRecord> baseline_evals = evals_of(evals, baseline_ids);

  size_t written = 0;
  for (const std::string& id : ids) {
    if (have.count(id) != 0) {
      ++written;
      continue;
    }
    try {
      store.append_reward(summarize(id, evals, baseline_evals));
      ++written;
    } catch (const Error& e) {
      if (e.code() != Errc::NoSuccessfulRuns) throw;
    }
  }
  return written;
}

struct BatchOutcome {
  std::vector<std::string> unique_valid_ids;  // sorted
  size_t generated = 0;
  size_t valid_records = 0;
};

// Generates and persists the batch (appending only the missing tail on
// resume), then reports the deduplicated valid id set.
BatchOutcome persist_batch(const LoopConfig& config, Store& store) {
  persist_generation(config, store);

  BatchOutcome outcome;
  std::set<std::string> seen;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.source == "builtin") continue;
    ++outcome.generated;
    if (!r.validator_report.passed || !r.canonical_text.has_value()) continue;
    ++outcome.valid_records;
    if (seen.insert(r.id).second) {
      outcome.unique_valid_ids.push_back(r.id);
    }
  }
  std::sort(outcome.unique_valid_ids.begin(), outcome.unique_valid_ids.end());
  return outcome;
}

std::map<std::string, SplitData> load_splits(const LoopConfig& config) {
  std::map<std::string, SplitData> splits;
  for (const std::string& task : config.tasks) {
    splits.emplace(task, load_task(task, config.data_dir,
                                   config.protocol.validation_fraction));
  }
  return splits;
}

std::vector<std::pair<std::string, HypothesisProgram>> programs_for(
    const Store& store, const std::vector<std::string>& ids) {
  std::map<std::string, std::string> canonical;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.canonical_text.has_value()) canonical[r.id] = *r.canonical_text;
  }
  std::vector<std::pair<std::string, HypothesisProgram>> programs;
  programs.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = canonical.find(id);
    if (it == canonical.end()) {
      throw Error(Errc::UnknownId, "no canonical text stored for " + id);
    }
    programs.emplace_back(id, parse(it->second));
  }
  return programs;
}

}  // namespace

size_t persist_generation(const LoopConfig& config, Store& store) {
  size_t have = 0;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.source != "builtin") ++have;
  }
  if (have >= config.batch_size) return 0;
  std::vector<RawCandidate> batch = generate_batch(config);
  size_t appended = 0;
  for (size_t i = have; i < batch.size(); ++i) {
    store.append_hypothesis(judge_candidate(batch[i], config.kind));
    ++appended;
  }
  return appended;
}

std::vector<std::string> stored_candidate_ids(const Store& store) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.source == "builtin") continue;
    if (!r.validator_report.passed || !r.canonical_text.has_value()) continue;
    if (seen.insert(r.id).second) ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

size_t evaluate_stored(const LoopConfig& config, Store& store,
                       const std::vector<std::string>& ids) {
  return evaluate_missing(config, store, programs_for(store, ids),
                          load_splits(config));
}

size_t summarize_stored(Store& store, const std::vector<std::string>& ids,
                        const std::vector<std::string>& baseline_ids) {
  std::set<std::string> baseline_set(baseline_ids.begin(), baseline_ids.end());
  return summarize_missing(store, ids, baseline_set);
}

std::vector<RawCandidate> generate_batch(const LoopConfig& config) {
  GeneratorRequest request;
  request.kind = config.kind;
  request.style = config.style;
  request.count = config.batch_size;
  request.seed = derive_seed(config.master_seed, "generate");
  if (config.source == "corpus") {
    try {
      return corpus_next(config.corpus_path, request);
    } catch (const Error& e) {
      if (e.code() == Errc::NotEnoughEntries) {
        throw Error(Errc::GeneratorExhausted, e.what());
      }
      throw;
    }
  }
  if (config.source == "random") {
    return random_next(request);
  }
  LlmEndpoint endpoint;
  endpoint.base_url = config.llm_base_url;
  endpoint.model = config.llm_model;
  endpoint.prompts_dir = config.prompts_dir;
  endpoint.temperature = config.temperature;
  endpoint.max_retries = config.max_retries;
  if (const char* key = std::getenv(config.llm_api_key_env.c_str())) {
    endpoint.api_key = key;
  }
  return llm_next(endpoint, request);
}

HypothesisRecord judge_candidate(const RawCandidate& candidate,
                                 ComponentKind kind) {
  HypothesisRecord record;
  record.kind = std::string(kind_name(kind));
  record.prompt_style = std::string(prompt_style_name(candidate.style));
  record.source = candidate.source;
  record.raw_text = candidate.text;
  record.validator_report = validate(candidate.text, kind);
  try {
    record.canonical_text = serialize(parse(candidate.text));
    record.id = sha256_hex(*record.canonical_text);
  } catch (const Error&) {
    record.id = sha256_hex(candidate.text);
  }
  return record;
}

RunManifest ensure_manifest(const LoopConfig& config, Store& store) {
  std::map<std::string, std::string> snapshot = loop_config_to_map(config);
  if (manifest_exists(store)) {
    RunManifest manifest = load_manifest(store);
    std::map<std::string, std::string> stored = manifest.config;
    stored.erase("jobs");
    std::map<std::string, std::string> ours = snapshot;
    ours.erase("jobs");
    if (stored != ours) {
      throw Error(Errc::InvalidConfig,
                  store.dir() + " belongs to a different configuration");
    }
    return manifest;
  }
  RunManifest manifest;
  manifest.run_id = run_id_of(config);
  manifest.created_at = utc_now();
  manifest.master_seed = config.master_seed;
  manifest.config = std::move(snapshot);
  for (const std::string& task : config.tasks) {
    manifest.dataset_checksums[task] =
        sha256_file(config.data_dir + "/" + task + ".csv");
  }
  save_manifest(store, manifest);
  return manifest;
}

std::vector<std::string> ensure_baselines(const LoopConfig& config, Store& store) {
  std::set<std::string> existing;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    existing.insert(r.id);
  }

  std::vector<std::string> ids;
  std::vector<std::pair<std::string, HypothesisProgram>> programs;
  for (const HypothesisProgram& prog : builtin_baselines(config.kind)) {
    std::string text = serialize(prog);
    std::string id = sha256_hex(text);
    ids.push_back(id);
    programs.emplace_back(id, prog);
    if (existing.count(id) != 0) continue;
    HypothesisRecord record;
    record.id = id;
    record.kind = std::string(kind_name(config.kind));
    record.prompt_style = "builtin";
    record.source = "builtin";
    record.raw_text = text;
    record.canonical_text = text;
    record.validator_report = validate(text, config.kind);
    store.append_hypothesis(record);
  }

  evaluate_missing(config, store, programs, load_splits(config));
  return ids;
}

LoopResult run_iteration1(const LoopConfig& config, Store& store) {
  RunManifest manifest = ensure_manifest(config, store);
  std::vector<std::string> baseline_ids = ensure_baselines(config, store);
  mark_stage(store, manifest, "baselines");

  BatchOutcome batch = persist_batch(config, store);
  mark_stage(store, manifest, "generated");

  LoopResult result;
  result.generated = batch.generated;
  result.valid = batch.unique_valid_ids.size();
  result.duplicates = batch.valid_records - batch.unique_valid_ids.size();

  evaluate_missing(config, store,
                   programs_for(store, batch.unique_valid_ids),
                   load_splits(config));
  result.evaluated = batch.unique_valid_ids.size();
  mark_stage(store, manifest, "evaluated");

  std::set<std::string> baseline_set(baseline_ids.begin(), baseline_ids.end());
  result.summarized =
      summarize_missing(store, batch.unique_valid_ids, baseline_set);
  mark_stage(store, manifest, "rewarded");
  return result;
}

LoopResult run_iteration2(const LoopConfig& config, Store& store,
                          const RankerState& ranker) {
  RunManifest manifest = ensure_manifest(config, store);
  std::vector<std::string> baseline_ids = ensure_baselines(config, store);
  mark_stage(store, manifest, "baselines");

  BatchOutcome batch = persist_batch(config, store);
  mark_stage(store, manifest, "generated");

  LoopResult result;
  result.generated = batch.generated;
  result.valid = batch.unique_valid_ids.size();
  result.duplicates = batch.valid_records - batch.unique_valid_ids.size();

  // score everything, evaluated or not
  std::string ranker_id = sha256_hex(ranker_to_json(ranker)).substr(0, 16);
  std::set<std::pair<std::string, std::string>> scored;
  for (const ScoreRecord& r : store.load_scores()) {
    scored.insert({r.hypothesis_id, r.ranker_id});
  }
  std::vector<std::pair<std::string, std::vector<double>>> features;
  for (const auto& [id, prog] : programs_for(store, batch.unique_valid_ids)) {
    features.emplace_back(id, featurize(prog));
  }
  for (const auto& [id, f] : features) {
    if (scored.count({id, ranker_id}) != 0) continue;
    ScoreRecord record;
    record.hypothesis_id = id;
    record.ranker_id = ranker_id;
    record.score = score(ranker, f);
    store.append_score(record);
  }
  result.scored = features.size();
  mark_stage(store, manifest, "scored");

  std::vector<std::string> chosen = top_k(ranker, features, config.top_k);
  std::sort(chosen.begin(), chosen.end());
  evaluate_missing(config, store, programs_for(store, chosen),
                   load_splits(config));
  result.evaluated = chosen.size();
  mark_stage(store, manifest, "evaluated");

  std::set<std::string> baseline_set(baseline_ids.begin(), baseline_ids.end());
  result.summarized = summarize_missing(store, chosen, baseline_set);
  mark_stage(store, manifest, "rewarded");
  return result;
}

}  // namespace hypsearch
