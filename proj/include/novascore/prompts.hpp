#pragma once

// Prompt templates for every generative-model call. Slots are written
// `{slot name}` and filled in a single pass, so slot values are never
// re-scanned for further slots.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace novascore {

enum class TemplateId { acu_extract_salience, nli_batch, qa_question_gen, qa_answering };

inline constexpr int kPromptTemplateVersion = 1;

std::string_view to_string(TemplateId id);
// Throws Error(InvalidArgument) for unknown names.
TemplateId parse_template_id(std::string_view name);

std::string_view template_text(TemplateId id);

// Slot names each template expects.
std::vector<std::string> template_slots(TemplateId id);

// Throws Error(InvalidArgument) if a slot the template expects is missing
// or an unknown slot is supplied.
std::string render_template(TemplateId id, const std::map<std::string, std::string>& slots);

// One-shot example shown in the extraction prompt.
struct ExtractionExample {
  std::string document;
  std::string output;
};

ExtractionExample default_extraction_example();

std::string render_extraction_prompt(std::string_view document, const ExtractionExample& example);

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

std::string render_nli_prompt(std::span<const NliPair> pairs);

std::string render_question_gen_prompt(std::span<const std::string> sentences);

struct QaItem {
  std::string context;
  std::vector<std::string> questions;
};

std::string render_answering_prompt(std::span<const QaItem> items);

}  // namespace novascore
