#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypsearch/ast.hpp"

namespace hypsearch {

enum class PromptStyle { IEP, NEP };

std::string_view prompt_style_name(PromptStyle style);
PromptStyle prompt_style_from_name(std::string_view name);

struct GeneratorRequest {
  ComponentKind kind = ComponentKind::Activation;
  PromptStyle style = PromptStyle::IEP;
  size_t count = 0;
  uint64_t seed = 0;
};

// Raw text is preserved verbatim for audit, even when malformed or empty.
struct RawCandidate {
  std::string text;
  std::string source;
  PromptStyle style = PromptStyle::IEP;
  std::string model;  // remote source only
  std::string note;   // fetch metadata
};

// First `count` entries of a `---`-separated corpus file, in file order.
std::vector<RawCandidate> corpus_next(const std::string& path,
                                      const GeneratorRequest& request);

// Seeded grammar sampler; every emitted text parses.
std::vector<RawCandidate> random_next(const GeneratorRequest& request);

struct LlmEndpoint {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "local-test";
  std::string api_key;   // from the environment, never persisted
  std::string prompts_dir = "prompts";
  double temperature = 1.0;
  int max_retries = 2;   // extra attempts after the first
};

// Loads prompts/<kind>_<style>.txt and substitutes {{grammar}} with
// prompts/grammar.txt.
std::string render_prompt(const std::string& prompts_dir, ComponentKind kind,
                          PromptStyle style);

// First fenced code block of a chat reply, empty string when there is none.
std::string extract_fenced_block(const std::string& reply);

// One chat-completion POST per candidate. Malformed replies are retried up
// to max_retries then recorded with empty text; 401/403 -> AuthError,
// persistent 429 -> RateLimited (Retry-After honored between attempts),
// other failures -> TransportError.
std::vector<RawCandidate> llm_next(const LlmEndpoint& endpoint,
                                   const GeneratorRequest& request);

struct DedupeResult {
  std::vector<RawCandidate> unique;
  size_t duplicates = 0;
};

// Drops candidates whose canonical serialization was already seen; first
// occurrence wins. Unparsable texts are never deduped.
DedupeResult dedupe(const std::vector<RawCandidate>& candidates);

}  // namespace hypsearch
