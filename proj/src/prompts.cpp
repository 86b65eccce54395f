#include "novascore/prompts.hpp"

#include <set>

#include "novascore/error.hpp"

namespace novascore {

namespace {

constexpr std::string_view kExtractionTemplate =
    R"(INSTRUCTION:
1. First, extract the list of all atomic content units (ACUs) from a given document. An ACU is an elementary information unit in the document that does not require further division. When identifying any named entity, temporal entity, location entity, or attribute, avoid using indirect references. Instead, specify the actual entity, attribute, or noun directly. For example, replace 'this company' with the actual name of the company, 'this location' with the actual location name, 'it' with the actual subject being referred, etc.
2. Then, summarize the given document.
3. Finally, using the summary, identify the most salient ACUs from the full list of ACUs. The salient ACUs should be those explicitly mentioned in the summary.
Output the response in JSON format:
{"all_acus": "array of ACU strings", "summary": "document summary", "salient_acus": "array of salient ACU strings"}

Example 1:
###Document: {example document}
###Output: {example output}

###Document: {input document}
###Output: )";

constexpr std::string_view kNliTemplate =
    R"(INSTRUCTION: For each given premise-hypothesis pair, perform Natural Language Inference (NLI) to determine whether the hypothesis should be classified as 'entailment', 'contradiction', or 'neutral' based on the information provided in the premise.
Output the response in JSON format:
{"nli_results": "array of NLI results in the following format: [{"id": int, "nli": "entailment"|"contradiction"|"neutral"}]"}

==============
EXAMPLE:
###Premise 1: ABC Bank reported a significant drop in profits for the second quarter due to rising loan defaults. The bank's CEO mentioned the challenging economic environment as a key factor.
###Hypothesis 1: ABC Bank's profits declined in the second quarter because of increased loadn defaults.

###Premise 2: Global oil prices surged by 5% on Monday following geopolitical tensions in the Middle East. Analysts predict that the prices may continue to rise if the situation escalates.
###Hypothesis 2: Oil price decreased despite tensions in the Middle East.

###Premise 3: The ECB decided to maintain its current monetary policy stance, keeping interest rates unchanged.
###Hypothesis 3: The ECB's decision will impact the foreign exchange rates of the Euro.

###Output:
{"nli_results": [{"id": 1, "nli": "entailment"}, {"id": 2, "nli": "contradiction"}, {"id": 3, "nli": "neutral"}]}

==============
{premise (similar ACUs) hypothesis (target ACU) pairs}
###Output:)";

constexpr std::string_view kQuestionGenTemplate =
    R"(INSTRUCTION: For each given sentence, generate three distinct questions that correspond to the named-entities and noun phrases found in this sentence, and use the sentence as the answer.
Output the response in JSON format:
{"questions_list": "list of question arrays in the format: [[question_str, ...], [question_str, ...], ...]"}

==============
EXAMPLE:
###Sentences:
1: The stock market experienced a sharp decline due to economic uncertainty.
2: Albert Einstein, a theoretical physicist, developed the theory of relativity.

###Output:
{"questions_list": [["What sector faced a significant downturn because of economic uncertainty?", "Why did the stock market show a sudden decrease recently?", "What caused the sharp decline in the financial markets?"], ["Who is credited with developing the theory of relativity?", "What field was Albert Einstein associated with?", "What significant scientific theory did Albert Einstein develop?"]]}

==============
###Sentences:
{target ACUs}
###Output:
)";

constexpr std::string_view kAnsweringTemplate =
    R"(INSTRUCTION: For each context-questions pairs, follow these steps:
1. Given the context, answer the following questions.
2. Consolidate all responses into a single concise sentence.

==============
EXAMPLE:
Context 1: The stock market experienced a sharp decline due to economic uncertainty.
Q1: What sector faced a significant downturn because of economic uncertainty?
Q2: Why did the stock market show a sudden decrease recently?
Q3: What caused the sharp decline in the financial markets?
Context 2: Albert Einstein, a theoretical physicist, developed the theory of relativity.
Q1: Who is credited with developing the theory of relativity?
Q2: What field was Albert Einstein associated with?
Q3: What significant scientific theory did Albert Einstein develop?

###Output:
{"answers": ["The stock market experienced a sharp decline due to economic uncertainty.", " Albert Einstein, a theoretical physicist, developed the theory of relativity."]}

==============
{context (similar ACUs) questions (generated questions) list}
###Output:
)";

constexpr std::string_view kSlotExtractExampleDoc = "example document";
constexpr std::string_view kSlotExtractExampleOut = "example output";
constexpr std::string_view kSlotExtractInput = "input document";
constexpr std::string_view kSlotNliPairs = "premise (similar ACUs) hypothesis (target ACU) pairs";
constexpr std::string_view kSlotQgTargets = "target ACUs";
constexpr std::string_view kSlotQaItems = "context (similar ACUs) questions (generated questions) list";

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::acu_extract_salience: return "acu_extract_salience";
    case TemplateId::nli_batch: return "nli_batch";
    case TemplateId::qa_question_gen: return "qa_question_gen";
    case TemplateId::qa_answering: return "qa_answering";
  }
  return "acu_extract_salience";
}

TemplateId parse_template_id(std::string_view name) {
  for (auto id : {TemplateId::acu_extract_salience, TemplateId::nli_batch,
                  TemplateId::qa_question_gen, TemplateId::qa_answering}) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown template_id '" + std::string(name) + "'");
}

std::string_view template_text(TemplateId id) {
  switch (id) {
    case TemplateId::acu_extract_salience: return kExtractionTemplate;
    case TemplateId::nli_batch: return kNliTemplate;
    case TemplateId::qa_question_gen: return kQuestionGenTemplate;
    case TemplateId::qa_answering: return kAnsweringTemplate;
  }
  return kExtractionTemplate;
}

std::vector<std::string> template_slots(TemplateId id) {
  switch (id) {
    case TemplateId::acu_extract_salience:
      return {std::string(kSlotExtractExampleDoc), std::string(kSlotExtractExampleOut),
              std::string(kSlotExtractInput)};
    case TemplateId::nli_batch: return {std::string(kSlotNliPairs)};
    case TemplateId::qa_question_gen: return {std::string(kSlotQgTargets)};
    case TemplateId::qa_answering: return {std::string(kSlotQaItems)};
  }
  return {};
}

std::string render_template(TemplateId id, const std::map<std::string, std::string>& slots) {
  const auto expected = template_slots(id);
  const std::set<std::string> expected_set(expected.begin(), expected.end());
  for (const auto& [name, value] : slots) {
    if (expected_set.count(name) == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "template " + std::string(to_string(id)) + " has no slot {" + name + "}");
    }
  }
  for (const auto& name : expected) {
    if (slots.count(name) == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "template " + std::string(to_string(id)) + " needs slot {" + name + "}");
    }
  }

  const std::string_view text = template_text(id);
  std::string out;
  out.reserve(text.size() + 256);
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '{') {
      bool replaced = false;
      for (const auto& [name, value] : slots) {
        const std::size_t len = name.size() + 2;
        if (text.compare(pos + 1, name.size(), name) == 0 && pos + len <= text.size() &&
            text[pos + len - 1] == '}') {
          out += value;
          pos += len;
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out.push_back(text[pos++]);
  }
  return out;
}

ExtractionExample default_extraction_example() {
  return {
      "The Springfield city council approved a new budget on Tuesday. The budget allocates $2 "
      "million to repair public parks. Council member Jane Doe voted against the measure, citing "
      "concerns about rising costs.",
      R"({"all_acus": ["The Springfield city council approved a new budget on Tuesday.", "The Springfield city budget allocates $2 million to repair public parks.", "Council member Jane Doe voted against the Springfield city budget.", "Jane Doe cited concerns about rising costs when voting against the Springfield city budget."], "summary": "The Springfield city council approved a new budget on Tuesday that allocates $2 million to repair public parks.", "salient_acus": ["The Springfield city council approved a new budget on Tuesday.", "The Springfield city budget allocates $2 million to repair public parks."]})"};
}

std::string render_extraction_prompt(std::string_view document, const ExtractionExample& example) {
  return render_template(TemplateId::acu_extract_salience,
                         {{std::string(kSlotExtractExampleDoc), example.document},
                          {std::string(kSlotExtractExampleOut), example.output},
                          {std::string(kSlotExtractInput), std::string(document)}});
}

std::string render_nli_prompt(std::span<const NliPair> pairs) {
  std::string block;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto id = std::to_string(i + 1);
    if (i > 0) block += "\n";
    block += "###Premise " + id + ": " + pairs[i].premise + "\n";
    block += "###Hypothesis " + id + ": " + pairs[i].hypothesis + "\n";
  }
  return render_template(TemplateId::nli_batch, {{std::string(kSlotNliPairs), block}});
}

std::string render_question_gen_prompt(std::span<const std::string> sentences) {
  std::string block;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) block += "\n";
    block += std::to_string(i + 1) + ": " + sentences[i];
  }
  return render_template(TemplateId::qa_question_gen, {{std::string(kSlotQgTargets), block}});
}

std::string render_answering_prompt(std::span<const QaItem> items) {
  std::string block;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) block += "\n";
    block += "Context " + std::to_string(i + 1) + ": " + items[i].context;
    for (std::size_t q = 0; q < items[i].questions.size(); ++q) {
      block += "\nQ" + std::to_string(q + 1) + ": " + items[i].questions[q];
    }
  }
  return render_template(TemplateId::qa_answering, {{std::string(kSlotQaItems), block}});
}

}  // namespace novascore
