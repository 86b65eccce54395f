#include "novascore/llm_backend.hpp"

#include <cctype>
#include <fstream>

#include "novascore/error.hpp"

namespace novascore {

std::string_view to_string(ModuleTag tag) {
  switch (tag) {
    case ModuleTag::extraction_salience: return "extraction_salience";
    case ModuleTag::nli_evaluator: return "nli_evaluator";
    case ModuleTag::qa_evaluator: return "qa_evaluator";
  }
  return "extraction_salience";
}

ModuleTag module_tag_for(TemplateId id) {
  switch (id) {
    case TemplateId::acu_extract_salience: return ModuleTag::extraction_salience;
    case TemplateId::nli_batch: return ModuleTag::nli_evaluator;
    case TemplateId::qa_question_gen:
    case TemplateId::qa_answering: return ModuleTag::qa_evaluator;
  }
  return ModuleTag::extraction_salience;
}

void TokenLedger::record(const TokenUsage& usage) {
  std::lock_guard lock(mu_);
  auto& t = totals_[usage.module_tag];
  t.prompt_tokens += usage.prompt_tokens;
  t.completion_tokens += usage.completion_tokens;
  ++t.calls;
}

TokenTotals TokenLedger::totals(ModuleTag tag) const {
  std::lock_guard lock(mu_);
  auto it = totals_.find(tag);
  return it == totals_.end() ? TokenTotals{} : it->second;
}

std::map<ModuleTag, TokenTotals> TokenLedger::snapshot() const {
  std::lock_guard lock(mu_);
  return totals_;
}

TokenTotals TokenLedger::grand_total() const {
  std::lock_guard lock(mu_);
  TokenTotals sum;
  for (const auto& [tag, t] : totals_) {
    sum.prompt_tokens += t.prompt_tokens;
    sum.completion_tokens += t.completion_tokens;
    sum.calls += t.calls;
  }
  return sum;
}

namespace {

// Index one past the '}' matching the '{' at `start`, or npos when the
// object never closes.
std::size_t match_object(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

nlohmann::json parse_json_payload(std::string_view raw_text) {
  std::optional<std::string> first_failure;
  std::size_t pos = raw_text.find('{');
  if (pos == std::string_view::npos) {
    throw Error(ErrorCode::NoJsonFound, "no JSON object in model output");
  }
  while (pos != std::string_view::npos) {
    std::size_t end = match_object(raw_text, pos);
    if (end == std::string_view::npos) {
      if (!first_failure) {
        first_failure = "unterminated object starting at byte " + std::to_string(pos);
      }
    } else {
      try {
        auto value = nlohmann::json::parse(raw_text.substr(pos, end - pos));
        if (value.is_object()) return value;
      } catch (const nlohmann::json::parse_error& e) {
        if (!first_failure) {
          first_failure = "parse error at byte " + std::to_string(pos + e.byte - 1) + ": " + e.what();
        }
      }
    }
    pos = raw_text.find('{', pos + 1);
  }
  throw Error(ErrorCode::MalformedJson, *first_failure);
}

LlmResponse LlmBackend::complete(const LlmRequest& request) {
  RawCompletion raw = do_complete(request);
  LlmResponse response;
  response.raw_text = std::move(raw.text);
  response.usage = {raw.prompt_tokens, raw.completion_tokens, module_tag_for(request.template_id)};
  ledger_.record(response.usage);
  try {
    response.parsed_json = parse_json_payload(response.raw_text);
  } catch (const Error&) {
    response.parsed_json.reset();
  }
  return response;
}

std::uint64_t count_words(std::string_view text) {
  std::uint64_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

void ScriptedBackend::enqueue(TemplateId id, std::string response) {
  std::lock_guard lock(mu_);
  queues_[id].push_back({std::move(response), std::nullopt});
}

void ScriptedBackend::enqueue(TemplateId id, std::string response, std::uint64_t prompt_tokens,
                              std::uint64_t completion_tokens) {
  std::lock_guard lock(mu_);
  queues_[id].push_back({std::move(response), std::make_pair(prompt_tokens, completion_tokens)});
}

void ScriptedBackend::load_script(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ParseError,
                std::string(source_name) + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(e.what());
    }
    if (!j.is_object() || !j.contains("template_id") || !j["template_id"].is_string() ||
        !j.contains("response")) {
      fail("expected {\"template_id\": str, \"response\": ...}");
    }
    TemplateId id;
    try {
      id = parse_template_id(j["template_id"].get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
    std::string response =
        j["response"].is_string() ? j["response"].get<std::string>() : j["response"].dump();
    if (j.contains("usage")) {
      const auto& u = j["usage"];
      if (!u.is_object() || !u.contains("prompt_tokens") || !u.contains("completion_tokens") ||
          !u["prompt_tokens"].is_number_unsigned() || !u["completion_tokens"].is_number_unsigned()) {
        fail("usage must hold unsigned prompt_tokens and completion_tokens");
      }
      enqueue(id, std::move(response), u["prompt_tokens"].get<std::uint64_t>(),
              u["completion_tokens"].get<std::uint64_t>());
    } else {
      enqueue(id, std::move(response));
    }
  }
}

void ScriptedBackend::load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open script " + path.string());
  load_script(in, path.string());
}

std::size_t ScriptedBackend::remaining(TemplateId id) const {
  std::lock_guard lock(mu_);
  auto it = queues_.find(id);
  return it == queues_.end() ? 0 : it->second.size();
}

LlmBackend::RawCompletion ScriptedBackend::do_complete(const LlmRequest& request) {
  Entry entry;
  {
    std::lock_guard lock(mu_);
    auto& queue = queues_[request.template_id];
    if (queue.empty()) {
      throw Error(ErrorCode::ScriptExhausted, "no scripted response left for template " +
                                                  std::string(to_string(request.template_id)));
    }
    entry = std::move(queue.front());
    queue.pop_front();
  }
  RawCompletion out;
  if (entry.usage) {
    out.prompt_tokens = entry.usage->first;
    out.completion_tokens = entry.usage->second;
  } else {
    out.prompt_tokens = count_words(request.rendered_prompt);
    out.completion_tokens = count_words(entry.response);
  }
  out.text = std::move(entry.response);
  return out;
}

RemoteChatBackend::RemoteChatBackend(std::string endpoint, HttpRetryPolicy retry)
    : endpoint_(std::move(endpoint)), retry_(retry) {
  if (endpoint_.empty()) throw Error(ErrorCode::InvalidArgument, "chat endpoint is empty");
}

LlmBackend::RawCompletion RemoteChatBackend::do_complete(const LlmRequest& request) {
  nlohmann::json body = {
      {"model", request.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.rendered_prompt}}})},
      {"temperature", request.temperature},
  };
  auto reply = post_json(endpoint_, body, env_secret("LLM_API_KEY"), retry_, "chat endpoint");
  RawCompletion out;
  try {
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (reply.contains("usage") && reply["usage"].is_object()) {
      const auto& u = reply["usage"];
      out.prompt_tokens = u.value("prompt_tokens", std::uint64_t{0});
      out.completion_tokens = u.value("completion_tokens", std::uint64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BackendUnavailable, std::string("malformed chat reply: ") + e.what());
  }
  return out;
}

}  // namespace novascore
