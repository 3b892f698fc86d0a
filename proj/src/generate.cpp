#include "hypsearch/generate.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hypsearch/digest.hpp"
#include "hypsearch/error.hpp"
#include "hypsearch/parse.hpp"
#include "hypsearch/random_program.hpp"
#include "hypsearch/rng.hpp"
#include "hypsearch/serialize.hpp"

namespace hypsearch {

std::string_view prompt_style_name(PromptStyle style) {
  return style == PromptStyle::IEP ? "IEP" : "NEP";
}

PromptStyle prompt_style_from_name(std::string_view name) {
  if (name == "IEP") return PromptStyle::IEP;
  if (name == "NEP") return PromptStyle::NEP;
  throw Error(Errc::CorruptRecord,
              "unknown prompt style: " + std::string(name));
}

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::MissingFile, "cannot open " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string strip_outer_blank(const std::string& text) {
  size_t begin = 0, end = text.size();
  while (begin < end && (text[begin] == '\n' || text[begin] == '\r' ||
                         text[begin] == ' ' || text[begin] == '\t')) {
    ++begin;
  }
  while (end > begin && (text[end - 1] == '\n' || text[end - 1] == '\r' ||
                         text[end - 1] == ' ' || text[end - 1] == '\t')) {
    --end;
  }
  return text.substr(begin, end - begin);
}

std::vector<std::string> split_corpus(const std::string& body) {
  std::vector<std::string> entries;
  std::string current;
  std::istringstream lines(body);
  std::string line;
  auto flush = [&]() {
    std::string entry = strip_outer_blank(current);
    if (!entry.empty()) entries.push_back(std::move(entry));
    current.clear();
  };
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "---") {
      flush();
    } else {
      current += line;
      current += '\n';
    }
  }
  flush();
  return entries;
}

}  // namespace

std::vector<RawCandidate> corpus_next(const std::string& path,
                                      const GeneratorRequest& request) {
  std::vector<std::string> entries = split_corpus(read_text_file(path));
  if (request.count > entries.size()) {
    throw Error(Errc::NotEnoughEntries,
                "corpus has " + std::to_string(entries.size()) +
                    " entries, requested " + std::to_string(request.count));
  }
  std::vector<RawCandidate> out;
  out.reserve(request.count);
  for (size_t i = 0; i < request.count; ++i) {
    RawCandidate c;
    c.text = entries[i];
    c.source = "corpus";
    c.style = request.style;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<RawCandidate> random_next(const GeneratorRequest& request) {
  Rng rng(derive_seed(request.seed, "generate"));
  std::vector<RawCandidate> out;
  out.reserve(request.count);
  for (size_t i = 0; i < request.count; ++i) {
    RawCandidate c;
    c.text = serialize(random_program(rng, request.kind));
    c.source = "random";
    c.style = request.style;
    out.push_back(std::move(c));
  }
  return out;
}

std::string render_prompt(const std::string& prompts_dir, ComponentKind kind,
                          PromptStyle style) {
  std::string name = std::string(kind_name(kind)) + "_" +
                     (style == PromptStyle::IEP ? "iep" : "nep") + ".txt";
  std::string body = read_text_file(prompts_dir + "/" + name);
  const std::string placeholder = "{{grammar}}";
  size_t at = body.find(placeholder);
  if (at != std::string::npos) {
    std::string grammar = read_text_file(prompts_dir + "/grammar.txt");
    body.replace(at, placeholder.size(), grammar);
  }
  return body;
}

std::string extract_fenced_block(const std::string& reply) {
  size_t open = reply.find("```");
  if (open == std::string::npos) return "";
  size_t line_end = reply.find('\n', open);
  if (line_end == std::string::npos) return "";
  size_t close = reply.find("```", line_end + 1);
  if (close == std::string::npos) return "";
  return strip_outer_blank(reply.substr(line_end + 1, close - line_end - 1));
}

namespace {

int retry_after_seconds(const httplib::Response& res) {
  std::string value = res.get_header_value("Retry-After");
  if (value.empty()) return 1;
  try {
    int seconds = std::stoi(value);
    return seconds < 0 ? 0 : (seconds > 30 ? 30 : seconds);
  } catch (const std::exception&) {
    return 1;
  }
}

// One reply text, or empty string on a malformed-but-2xx response; throws
// on auth, persistent rate limiting, and transport failure.
std::string fetch_once(httplib::Client& client, const LlmEndpoint& endpoint,
                       const std::string& prompt) {
  nlohmann::json body = {
      {"model", endpoint.model},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", endpoint.temperature},
  };
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  int transport_left = endpoint.max_retries;
  int rate_left = endpoint.max_retries;
  for (;;) {
    httplib::Result res =
        client.Post(endpoint.path, headers, body.dump(), "application/json");
    if (!res) {
      if (transport_left-- > 0) continue;
      throw Error(Errc::TransportError,
                  "POST " + endpoint.path + " failed: " +
                      httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(Errc::AuthError,
                  "endpoint rejected credential (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (res->status == 429) {
      if (rate_left-- > 0) {
        std::this_thread::sleep_for(
            std::chrono::seconds(retry_after_seconds(*res)));
        continue;
      }
      throw Error(Errc::RateLimited, "still rate limited after retries");
    }
    if (res->status < 200 || res->status >= 300) {
      if (transport_left-- > 0) continue;
      throw Error(Errc::TransportError,
                  "HTTP " + std::to_string(res->status));
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty()) {
      return "";
    }
    const nlohmann::json& first = reply["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      return "";
    }
    return first["message"]["content"].get<std::string>();
  }
}

}  // namespace

std::vector<RawCandidate> llm_next(const LlmEndpoint& endpoint,
                                   const GeneratorRequest& request) {
  std::string prompt =
      render_prompt(endpoint.prompts_dir, request.kind, request.style);
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(30);
  client.set_read_timeout(60);

  std::vector<RawCandidate> out;
  out.reserve(request.count);
  for (size_t i = 0; i < request.count; ++i) {
    RawCandidate c;
    c.source = "llm";
    c.style = request.style;
    c.model = endpoint.model;
    int attempts = 0;
    for (; attempts <= endpoint.max_retries && c.text.empty(); ++attempts) {
      c.text = extract_fenced_block(fetch_once(client, endpoint, prompt));
    }
    c.note = c.text.empty() ? "no fenced block after " +
                                  std::to_string(attempts) + " attempts"
                            : "attempts=" + std::to_string(attempts);
    out.push_back(std::move(c));
  }
  return out;
}

DedupeResult dedupe(const std::vector<RawCandidate>& candidates) {
  DedupeResult result;
  std::unordered_set<std::string> seen;
  for (const RawCandidate& c : candidates) {
    std::string canonical;
    try {
      canonical = serialize(parse(c.text));
    } catch (const Error&) {
      result.unique.push_back(c);  // unparsable, audit keeps it
      continue;
    }
    if (seen.insert(sha256_hex(canonical)).second) {
      result.unique.push_back(c);
    } else {
      ++result.duplicates;
    }
  }
  return result;
}

}  // namespace hypsearch
