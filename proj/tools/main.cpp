#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypsearch/digest.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/featurize.hpp"
#include "hypsearch/loop.hpp"
#include "hypsearch/parse.hpp"
#include "hypsearch/report.hpp"
#include "hypsearch/rng.hpp"

using namespace hypsearch;

namespace {

const char* kUsage = R"(usage: hypsearch <subcommand> [flags]

subcommands
  generate        generate a batch of candidates into the run directory
  validate [file] validate a DSL file, or report the stored pass rate
  baselines       evaluate the builtin baseline set for the configured kind
  evaluate        evaluate every stored valid candidate on all tasks
  reward          summarize win rates against the baselines
  train-ranker    fit the reward model on this run's outcomes
  rank            score stored candidates with a trained ranker
  loop            run a full iteration (add --ranker for iteration 2)
  efficiency      emit efficiency curves (oracle / ranker / random)
  select-diverse  greedy reward-diversity selection over rewarded candidates
  report          render the per-(kind, style) summary table

flags
  --run-dir DIR   run directory holding the JSONL stores (default: run)
  --config FILE   flat key = value config file; keys as in configs/demo.toml
  --seed N        override the master seed
  --jobs N        parallel evaluation workers
  --kind K        override the component kind (validate, baselines, ...)
  --ranker FILE   ranker JSON path (default: <run-dir>/ranker.json)
  --out FILE      output path for train-ranker

The llm source reads its API key from the environment variable named by the
llm_api_key_env config key (default HYPSEARCH_API_KEY). The key is only ever
sent as the request's bearer token; it is never written to disk.
)";

struct Args {
  std::string subcommand;
  std::string run_dir = "run";
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<size_t> jobs;
  std::string kind;
  std::string ranker_path;
  std::string out_path;
  std::vector<std::string> positional;
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

uint64_t parse_u64(const std::string& flag, const std::string& text) {
  try {
    size_t used = 0;
    uint64_t value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw UsageError(flag + " expects a non-negative integer, got: " + text);
  }
}

Args parse_args(int argc, char** argv) {
  Args args;
  if (argc < 2) throw UsageError("missing subcommand");
  args.subcommand = argv[1];

  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    auto value = [&]() -> std::string {
      if (i + 1 >= argc) throw UsageError(arg + " expects a value");
      return argv[++i];
    };
    if (arg == "--run-dir") {
      args.run_dir = value();
    } else if (arg == "--config") {
      args.config_path = value();
    } else if (arg == "--seed") {
      args.seed = parse_u64(arg, value());
    } else if (arg == "--jobs") {
      args.jobs = static_cast<size_t>(parse_u64(arg, value()));
    } else if (arg == "--kind") {
      args.kind = value();
    } else if (arg == "--ranker") {
      args.ranker_path = value();
    } else if (arg == "--out") {
      args.out_path = value();
    } else if (arg.rfind("--", 0) == 0) {
      throw UsageError("unknown flag: " + arg);
    } else {
      args.positional.push_back(arg);
    }
  }
  return args;
}

LoopConfig config_of(const Args& args) {
  LoopConfig config = args.config_path.empty()
                          ? loop_config_from_map({})
                          : load_loop_config(args.config_path);
  if (args.seed) config.master_seed = *args.seed;
  if (args.jobs) config.jobs = std::max<size_t>(1, *args.jobs);
  if (!args.kind.empty()) {
    config.kind = kind_from_name(args.kind);
  }
  return config;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, "cannot open " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out << body;
}

std::string ranker_path_of(const Args& args) {
  return args.ranker_path.empty() ? args.run_dir + "/ranker.json"
                                  : args.ranker_path;
}

// canonical text per stored id (first record wins; duplicates are identical)
std::map<std::string, std::string> canonical_texts(const Store& store) {
  std::map<std::string, std::string> texts;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.source == "builtin" || !r.canonical_text.has_value()) continue;
    texts.emplace(r.id, *r.canonical_text);
  }
  return texts;
}

int cmd_generate(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  ensure_manifest(config, store);
  size_t appended = persist_generation(config, store);
  std::vector<std::string> ids = stored_candidate_ids(store);
  std::printf("appended %zu records; %zu unique valid candidates in %s\n",
              appended, ids.size(), store.dir().c_str());
  return 0;
}

int cmd_validate(const LoopConfig& config, const Args& args) {
  if (!args.positional.empty()) {
    std::string text = read_file(args.positional[0]);
    ValidationReport report = validate(text, config.kind);
    for (const CheckResult& check : report.checks) {
      std::printf("%-5s %-21s %s\n", check.passed ? "pass" : "FAIL",
                  check.name.c_str(), check.detail.c_str());
    }
    std::printf("%s: %s\n", args.positional[0].c_str(),
                report.passed ? "valid" : "invalid");
    return 0;
  }
  Store store(args.run_dir);
  std::vector<ValidationReport> reports;
  for (const HypothesisRecord& r : store.load_hypotheses()) {
    if (r.source != "builtin") reports.push_back(r.validator_report);
  }
  std::printf("validator pass rate: %.4f over %zu candidates\n",
              validator_pass_rate(reports), reports.size());
  return 0;
}

int cmd_baselines(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  ensure_manifest(config, store);
  std::vector<std::string> ids = ensure_baselines(config, store);
  std::printf("evaluated %zu %s baselines\n", ids.size(),
              std::string(kind_name(config.kind)).c_str());
  for (const std::string& id : ids) std::printf("  %s\n", id.c_str());
  return 0;
}

int cmd_evaluate(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  ensure_manifest(config, store);
  std::vector<std::string> ids = stored_candidate_ids(store);
  size_t appended = evaluate_stored(config, store, ids);
  std::printf("%zu candidates, %zu eval records appended\n", ids.size(),
              appended);
  return 0;
}

int cmd_reward(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  ensure_manifest(config, store);
  std::vector<std::string> baseline_ids = ensure_baselines(config, store);
  std::vector<std::string> ids = stored_candidate_ids(store);
  size_t summarized = summarize_stored(store, ids, baseline_ids);
  std::printf("%zu of %zu candidates have reward summaries\n", summarized,
              ids.size());
  return 0;
}

int cmd_train_ranker(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  std::map<std::string, std::string> texts = canonical_texts(store);
  std::vector<RankerItem> items;
  for (const RewardSummary& r : store.load_rewards()) {
    auto it = texts.find(r.hypothesis_id);
    if (it == texts.end()) continue;
    items.push_back({featurize(parse(it->second)), r.reward});
  }
  if (items.empty()) {
    throw Error(Errc::NoEvaluations,
                "no rewarded candidates to train on in " + args.run_dir);
  }
  RankerState ranker =
      fit(items, config.ranker, derive_seed(config.master_seed, "ranker"));
  std::string json = ranker_to_json(ranker);
  std::string path = args.out_path.empty() ? ranker_path_of(args) : args.out_path;
  write_file(path, json);
  std::printf("ranker %s trained on %zu items -> %s\n",
              sha256_hex(json).substr(0, 16).c_str(), items.size(),
              path.c_str());
  return 0;
}

int cmd_rank(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  RankerState ranker = ranker_from_json(read_file(ranker_path_of(args)));
  std::string ranker_id = sha256_hex(ranker_to_json(ranker)).substr(0, 16);

  std::map<std::string, std::string> texts = canonical_texts(store);
  std::set<std::pair<std::string, std::string>> have;
  for (const ScoreRecord& r : store.load_scores()) {
    have.insert({r.hypothesis_id, r.ranker_id});
  }
  std::vector<std::pair<double, std::string>> ranking;
  for (const std::string& id : stored_candidate_ids(store)) {
    double s = score(ranker, featurize(parse(texts.at(id))));
    ranking.push_back({s, id});
    if (have.count({id, ranker_id}) == 0) {
      store.append_score({id, ranker_id, s});
    }
  }
  std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  size_t shown = std::min(config.top_k, ranking.size());
  for (size_t i = 0; i < shown; ++i) {
    std::printf("%3zu  %+.6f  %s\n", i + 1, ranking[i].first,
                ranking[i].second.c_str());
  }
  std::printf("scored %zu candidates with ranker %s\n", ranking.size(),
              ranker_id.c_str());
  return 0;
}

int cmd_loop(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  LoopResult result;
  if (!args.ranker_path.empty()) {
    RankerState ranker = ranker_from_json(read_file(args.ranker_path));
    result = run_iteration2(config, store, ranker);
    std::printf("iteration 2: scored %zu, evaluated top %zu\n", result.scored,
                result.evaluated);
  } else {
    result = run_iteration1(config, store);
    std::printf("iteration 1: evaluated all %zu valid candidates\n",
                result.evaluated);
  }
  std::printf(
      "generated %zu (%zu valid, %zu duplicates); %zu reward summaries\n",
      result.generated, result.valid, result.duplicates, result.summarized);
  std::printf("stores under %s\n", store.dir().c_str());
  return 0;
}

int cmd_efficiency(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  std::map<std::string, double> rewards;
  for (const RewardSummary& r : store.load_rewards()) {
    rewards[r.hypothesis_id] = r.reward;
  }
  if (rewards.empty()) {
    throw Error(Errc::NoEvaluations,
                "no evaluations in this run directory (rewards store is empty)");
  }

  std::vector<std::pair<EfficiencyCurve, std::string>> curves;

  std::vector<std::string> oracle_order;
  for (const auto& [id, reward] : rewards) oracle_order.push_back(id);
  std::sort(oracle_order.begin(), oracle_order.end(),
            [&](const std::string& a, const std::string& b) {
              return rewards.at(a) != rewards.at(b)
                         ? rewards.at(a) > rewards.at(b)
                         : a < b;
            });
  curves.push_back({efficiency_curve("oracle", oracle_order, rewards,
                                     config.window, config.aggregate),
                    "efficiency_oracle.csv"});

  // one curve per ranker whose scores cover the rewarded set
  std::map<std::string, std::map<std::string, double>> by_ranker;
  for (const ScoreRecord& r : store.load_scores()) {
    by_ranker[r.ranker_id][r.hypothesis_id] = r.score;
  }
  for (const auto& [ranker_id, scores] : by_ranker) {
    std::vector<std::string> order;
    for (const auto& [id, reward] : rewards) {
      if (scores.count(id) != 0) order.push_back(id);
    }
    if (order.size() != rewards.size()) {
      std::fprintf(stderr, "ranker %s skipped: scores cover %zu of %zu\n",
                   ranker_id.c_str(), order.size(), rewards.size());
      continue;
    }
    std::sort(order.begin(), order.end(),
              [&](const std::string& a, const std::string& b) {
                return scores.at(a) != scores.at(b) ? scores.at(a) > scores.at(b)
                                                    : a < b;
              });
    curves.push_back({efficiency_curve("ranker-" + ranker_id, order, rewards,
                                       config.window, config.aggregate),
                      "efficiency_ranker-" + ranker_id + ".csv"});
  }

  EfficiencyCurve random = random_baseline_curve(
      rewards, config.window, config.shuffles,
      derive_seed(config.master_seed, "efficiency"), config.aggregate);
  random.ordering_id = "random";
  curves.push_back({random, "efficiency_random.csv"});

  for (const auto& [curve, file] : curves) {
    write_file(args.run_dir + "/" + file, render_efficiency_csv(curve));
    std::printf("%-24s auc %.6f  -> %s\n", curve.ordering_id.c_str(), curve.auc,
                file.c_str());
  }
  return 0;
}

int cmd_select_diverse(const LoopConfig& config, const Args& args) {
  Store store(args.run_dir);
  std::map<std::string, std::string> texts = canonical_texts(store);
  std::vector<DiverseCandidate> candidates;
  for (const RewardSummary& r : store.load_rewards()) {
    auto it = texts.find(r.hypothesis_id);
    if (it == texts.end()) continue;
    candidates.push_back(
        {r.hypothesis_id, r.reward, featurize(parse(it->second))});
  }
  DiversitySelection selection = greedy_diverse_select(
      candidates, config.top_k, config.alpha, config.n_score_mode);

  std::string run = manifest_exists(store) ? load_manifest(store).run_id : "adhoc";
  std::string file = "similarity_" + run + ".csv";
  write_file(args.run_dir + "/" + file, render_similarity_csv(selection));

  std::printf("selected %zu of %zu (alpha %.2f)\n", selection.ids.size(),
              candidates.size(), config.alpha);
  for (size_t i = 0; i < selection.ids.size(); ++i) {
    std::printf("%3zu  n-score %.4f  %s\n", i + 1, selection.n_score[i],
                selection.ids[i].c_str());
  }
  std::printf("similarity matrix -> %s\n", file.c_str());
  std::printf(
      "note: the greedy trade-off and the n-score are this tool's "
      "concretizations; see README, Selection notes.\n");
  return 0;
}

int cmd_report(const Args& args) {
  Store store(args.run_dir);
  std::vector<RewardSummary> rewards = store.load_rewards();
  ReportTable table = build_report(store.load_hypotheses(), rewards);
  std::fputs(render_report_text(table).c_str(), stdout);
  write_file(args.run_dir + "/report.csv", render_report_csv(table));
  write_file(args.run_dir + "/scatter.csv", render_scatter_csv(rewards));
  std::printf("\nwrote %s/report.csv and %s/scatter.csv\n",
              args.run_dir.c_str(), args.run_dir.c_str());
  return 0;
}

int dispatch(const Args& args) {
  if (args.subcommand == "report") return cmd_report(args);

  LoopConfig config = config_of(args);
  if (args.subcommand == "generate") return cmd_generate(config, args);
  if (args.subcommand == "validate") return cmd_validate(config, args);
  if (args.subcommand == "baselines") return cmd_baselines(config, args);
  if (args.subcommand == "evaluate") return cmd_evaluate(config, args);
  if (args.subcommand == "reward") return cmd_reward(config, args);
  if (args.subcommand == "train-ranker") return cmd_train_ranker(config, args);
  if (args.subcommand == "rank") return cmd_rank(config, args);
  if (args.subcommand == "loop") return cmd_loop(config, args);
  if (args.subcommand == "efficiency") return cmd_efficiency(config, args);
  if (args.subcommand == "select-diverse") return cmd_select_diverse(config, args);
  throw UsageError("unknown subcommand: " + args.subcommand);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 2 && (std::string(argv[1]) == "--help" ||
                    std::string(argv[1]) == "-h" ||
                    std::string(argv[1]) == "help")) {
    std::fputs(kUsage, stdout);
    return 0;
  }
  try {
    return dispatch(parse_args(argc, argv));
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n\n", e.what());
    std::fputs(kUsage, stderr);
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
