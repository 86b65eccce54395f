#pragma once

// Gateway for every generative-model call: request construction, JSON
// payload extraction, retries and per-module token accounting.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "novascore/http.hpp"
#include "novascore/prompts.hpp"

namespace novascore {

enum class ModuleTag { extraction_salience, nli_evaluator, qa_evaluator };

std::string_view to_string(ModuleTag tag);
ModuleTag module_tag_for(TemplateId id);

struct TokenUsage {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  ModuleTag module_tag = ModuleTag::extraction_salience;
};

struct TokenTotals {
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::uint64_t calls = 0;

  std::uint64_t total() const { return prompt_tokens + completion_tokens; }
  friend bool operator==(const TokenTotals&, const TokenTotals&) = default;
};

// Thread-safe additive accumulator keyed by module.
class TokenLedger {
 public:
  void record(const TokenUsage& usage);
  TokenTotals totals(ModuleTag tag) const;
  std::map<ModuleTag, TokenTotals> snapshot() const;
  TokenTotals grand_total() const;

 private:
  mutable std::mutex mu_;
  std::map<ModuleTag, TokenTotals> totals_;
};

struct LlmRequest {
  TemplateId template_id = TemplateId::acu_extract_salience;
  std::string rendered_prompt;
  std::string model_name;
  double temperature = 0.0;
};

struct LlmResponse {
  std::string raw_text;
  std::optional<nlohmann::json> parsed_json;
  TokenUsage usage;
};

// Locates the first well-formed JSON object in model output, bare or inside
// a fenced code block, ignoring surrounding prose. Throws Error(NoJsonFound)
// when no '{' occurs, Error(MalformedJson) with a byte offset otherwise.
nlohmann::json parse_json_payload(std::string_view raw_text);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;

  // Runs the request, records usage under the template's module tag and
  // attaches the parsed payload when one is present.
  LlmResponse complete(const LlmRequest& request);

  TokenLedger& ledger() { return ledger_; }
  const TokenLedger& ledger() const { return ledger_; }

 protected:
  struct RawCompletion {
    std::string text;
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
  };

  virtual RawCompletion do_complete(const LlmRequest& request) = 0;

 private:
  TokenLedger ledger_;
};

// Serves canned responses from one FIFO queue per template. When a script
// line carries no usage, tokens are counted as whitespace-separated words
// of the prompt and of the response.
class ScriptedBackend final : public LlmBackend {
 public:
  ScriptedBackend() = default;

  void enqueue(TemplateId id, std::string response);
  void enqueue(TemplateId id, std::string response, std::uint64_t prompt_tokens,
               std::uint64_t completion_tokens);

  // Lines of {"template_id", "response", "usage"?}; a non-string response
  // is serialized to compact JSON text. Errors name the source line.
  void load_script(std::istream& in, std::string_view source_name = "<script>");
  void load_script(const std::filesystem::path& path);

  std::size_t remaining(TemplateId id) const;

 protected:
  RawCompletion do_complete(const LlmRequest& request) override;

 private:
  struct Entry {
    std::string response;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> usage;
  };

  mutable std::mutex mu_;
  std::map<TemplateId, std::deque<Entry>> queues_;
};

// Chat-completions client: {"model", "messages", "temperature"} in,
// choices[0].message.content and usage out. Bearer auth from LLM_API_KEY.
class RemoteChatBackend final : public LlmBackend {
 public:
  RemoteChatBackend(std::string endpoint, HttpRetryPolicy retry = {});

 protected:
  RawCompletion do_complete(const LlmRequest& request) override;

 private:
  std::string endpoint_;
  HttpRetryPolicy retry_;
};

std::uint64_t count_words(std::string_view text);

}  // namespace novascore
