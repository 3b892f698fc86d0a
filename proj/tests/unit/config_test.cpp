#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "hypsearch/config.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/loop.hpp"

using namespace hypsearch;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("config: flat key = value parsing") {
  std::map<std::string, std::string> m = parse_flat_config_text(
      "# leading comment\n"
      "kind = activation\n"
      "\n"
      "  batch_size=20   # trailing comment\n"
      "tasks = \"iris-cls, wine-cls\"\n"
      "alpha = 0.25\n"
      "alpha = 0.5\n");
  CHECK(m.size() == 4);
  CHECK(m.at("kind") == "activation");
  CHECK(m.at("batch_size") == "20");
  CHECK(m.at("tasks") == "iris-cls, wine-cls");
  CHECK(m.at("alpha") == "0.5");  // duplicate keys keep the last value
}

TEST_CASE("config: malformed lines name the line number") {
  try {
    parse_flat_config_text("kind = activation\nno equals sign here\n");
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(code_of([] { parse_flat_config_text(" = value\n"); }) ==
        Errc::InvalidConfig);
  CHECK(code_of([] { parse_flat_config("/nonexistent/config.cfg"); }) ==
        Errc::MissingFile);
}

TEST_CASE("config: typed getters convert or throw naming the key") {
  std::map<std::string, std::string> m = {
      {"d", "0.125"}, {"i", "-42"},   {"u", "42"},
      {"s", "text"},  {"bad", "abc"}, {"negu", "-1"},
      {"list", "a, b , ,c"}};
  ConfigView view{m};

  CHECK(view.get_double("d", 0.0) == 0.125);
  CHECK(view.get_double("missing", 1.5) == 1.5);
  CHECK(view.get_int("i", 0) == -42);
  CHECK(view.get_uint("u", 0) == 42);
  CHECK(view.get_string("s", "") == "text");
  CHECK(view.get_list("list", {}) ==
        std::vector<std::string>{"a", "b", "c"});
  CHECK(view.get_list("missing", {"x"}) == std::vector<std::string>{"x"});

  using Case = std::pair<std::string, std::function<void()>>;
  for (const Case& c :
       {Case{"bad", [&] { view.get_double("bad", 0.0); }},
        Case{"bad", [&] { view.get_int("bad", 0); }},
        Case{"bad", [&] { view.get_uint("bad", 0); }},
        Case{"negu", [&] { view.get_uint("negu", 0); }}}) {
    try {
      c.second();
      FAIL("expected InvalidConfig for ", c.first);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidConfig);
      CHECK(std::string(e.what()).find(c.first) != std::string::npos);
    }
  }
}

TEST_CASE("loop config: empty map yields the documented defaults") {
  LoopConfig c = loop_config_from_map({});
  CHECK(c.kind == ComponentKind::Activation);
  CHECK(c.style == PromptStyle::NEP);
  CHECK(c.source == "corpus");
  CHECK(c.corpus_path == "corpora/activation_demo.txt");
  CHECK(c.batch_size == 20);
  CHECK(c.top_k == 20);
  CHECK(c.protocol.mode == ProtocolMode::OneEpoch);
  CHECK(c.protocol.learning_rate == 0.01);
  CHECK(c.protocol.batch_size == 16);
  CHECK(c.protocol.runs_per_task == 3);
  CHECK(c.protocol.validation_fraction == 0.2);
  CHECK(c.tasks == std::vector<std::string>{"breast-cancer-cls", "diabetes-reg",
                                            "iris-cls", "wine-cls", "wine-reg"});
  CHECK(c.shuffles == 100);
  CHECK(c.alpha == 0.5);
  CHECK(c.window == 50);
  CHECK(c.aggregate == CurveAggregate::Sum);
  CHECK(c.n_score_mode == NScoreMode::MeanDistance);
  CHECK(c.master_seed == 20260817);
  CHECK(c.jobs == 1);
  CHECK(c.llm_api_key_env == "HYPSEARCH_API_KEY");
}

TEST_CASE("loop config: to_map and from_map round-trip") {
  LoopConfig c = loop_config_from_map({});
  c.kind = ComponentKind::Regularizer;
  c.style = PromptStyle::IEP;
  c.source = "random";
  c.batch_size = 7;
  c.top_k = 3;
  c.protocol.mode = ProtocolMode::SingleStep;
  c.protocol.learning_rate = 0.125;
  c.tasks = {"iris-cls"};
  c.alpha = 0.75;
  c.window = 9;
  c.aggregate = CurveAggregate::Mean;
  c.n_score_mode = NScoreMode::MinDistance;
  c.master_seed = 99;
  c.jobs = 4;

  std::map<std::string, std::string> m = loop_config_to_map(c);
  LoopConfig back = loop_config_from_map(m);
  CHECK(loop_config_to_map(back) == m);
  CHECK(back.kind == ComponentKind::Regularizer);
  CHECK(back.style == PromptStyle::IEP);
  CHECK(back.source == "random");
  CHECK(back.protocol.mode == ProtocolMode::SingleStep);
  CHECK(back.aggregate == CurveAggregate::Mean);
  CHECK(back.n_score_mode == NScoreMode::MinDistance);
  CHECK(back.jobs == 4);
}

TEST_CASE("loop config: every invalid value is rejected with InvalidConfig") {
  auto with = [](const std::string& key, const std::string& value) {
    return [key, value] {
      loop_config_from_map({{key, value}});
    };
  };
  CHECK(code_of(with("kind", "optimizer")) == Errc::InvalidConfig);
  CHECK(code_of(with("style", "XXL")) == Errc::InvalidConfig);
  CHECK(code_of(with("source", "psychic")) == Errc::InvalidConfig);
  CHECK(code_of(with("top_k", "0")) == Errc::InvalidConfig);
  CHECK(code_of(with("protocol", "two-epoch")) == Errc::InvalidConfig);
  CHECK(code_of(with("alpha", "1.5")) == Errc::InvalidConfig);
  CHECK(code_of(with("alpha", "-0.1")) == Errc::InvalidConfig);
  CHECK(code_of(with("window", "0")) == Errc::InvalidConfig);
  CHECK(code_of(with("efficiency_aggregate", "median")) == Errc::InvalidConfig);
  CHECK(code_of(with("n_score_mode", "max")) == Errc::InvalidConfig);
  CHECK(code_of(with("batch_size", "-1")) == Errc::InvalidConfig);
  CHECK(code_of(with("learning_rate", "fast")) == Errc::InvalidConfig);
  CHECK(code_of(with("definitely_not_a_key", "1")) == Errc::InvalidConfig);

  // jobs is a floor, not an error
  CHECK(loop_config_from_map({{"jobs", "0"}}).jobs == 1);
}

TEST_CASE("loop config: file loading and the shipped example agree") {
  const std::string path = "/tmp/hs_config_example.cfg";
  {
    std::ofstream out(path, std::ios::trunc);
    out << "kind = preprocessor\n"
        << "tasks = iris-cls, wine-reg\n"
        << "batch_size = 5\n";
  }
  LoopConfig c = load_loop_config(path);
  CHECK(c.kind == ComponentKind::Preprocessor);
  CHECK(c.tasks == std::vector<std::string>{"iris-cls", "wine-reg"});
  CHECK(c.batch_size == 5);
  std::filesystem::remove(path);
}
