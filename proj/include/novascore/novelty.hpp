#pragma once

// ACU-level novelty evaluators. Each maps a target ACU and its retrieved
// historical neighbours to a binary verdict with an evidence trail. A target
// without neighbours is novel and costs no model call.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "novascore/acubank.hpp"
#include "novascore/core_model.hpp"
#include "novascore/embedding.hpp"
#include "novascore/llm_backend.hpp"

namespace novascore {

struct EvaluatorConfig {
  EvaluatorKind kind = EvaluatorKind::CosSim;
  std::size_t retrieval_k = 5;
  double retrieval_min_sim = 0.6;
  double cossim_decision_threshold = 0.6;
  double qa_answer_sim_threshold = 0.85;
  std::size_t questions_per_acu = 3;
  // Targets per NLI / question-generation / answering call.
  std::size_t batch_size = 10;
  std::string model_name = "gpt-4o";

  void validate() const;
};

std::string_view evaluator_cli_name(EvaluatorKind kind);
// Accepts "cossim" | "nli" | "qa" (case-insensitive).
EvaluatorKind parse_evaluator_kind(std::string_view name);

// Case-insensitive; throws Error(NliParseError) for anything else.
NliLabel parse_nli_label(std::string_view text);

// Hit texts in the given (similarity-descending) order joined by one space.
std::string join_hit_texts(std::span<const RetrievalHit> hits);

NoveltyVerdict evaluate_cossim(const Acu& target, std::span<const RetrievalHit> hits,
                               const EvaluatorConfig& cfg);

std::vector<NoveltyVerdict> evaluate_nli(std::span<const Acu> targets,
                                         std::span<const std::vector<RetrievalHit>> hits_per_target,
                                         LlmBackend& backend, const EvaluatorConfig& cfg);

std::vector<NoveltyVerdict> evaluate_qa(std::span<const Acu> targets,
                                        std::span<const std::vector<RetrievalHit>> hits_per_target,
                                        LlmBackend& backend, const Embedder& embedder,
                                        const EvaluatorConfig& cfg);

}  // namespace novascore
