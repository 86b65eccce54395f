#include "novascore/novelty.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "novascore/error.hpp"

namespace novascore {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

NoveltyEvidence evidence_from_hits(std::span<const RetrievalHit> hits) {
  NoveltyEvidence evidence;
  for (const auto& h : hits) {
    evidence.hits.push_back({h.record.acu_id, h.record.doc_id, h.record.text, h.similarity});
  }
  if (!hits.empty()) {
    double best = hits.front().similarity;
    for (const auto& h : hits) best = std::max(best, h.similarity);
    evidence.max_similarity = best;
  }
  return evidence;
}

NoveltyVerdict novel_without_evidence(const Acu& target, EvaluatorKind kind) {
  return {target.acu_id, true, kind, {}};
}

void check_aligned(std::size_t targets, std::size_t hit_lists) {
  if (targets != hit_lists) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(targets) + " targets but " +
                                               std::to_string(hit_lists) + " hit lists");
  }
}

std::vector<std::vector<std::size_t>> batches_of(const std::vector<std::size_t>& items,
                                                 std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < items.size(); start += batch_size) {
    auto end = std::min(items.size(), start + batch_size);
    out.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(start),
                     items.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

nlohmann::json payload_or(ErrorCode code, const std::string& raw, std::string_view what) {
  try {
    return parse_json_payload(raw);
  } catch (const Error& e) {
    throw Error(code, std::string(what) + ": " + e.what());
  }
}

}  // namespace

void EvaluatorConfig::validate() const {
  auto in_unit = [](double t) { return t > 0.0 && t <= 1.0; };
  if (!in_unit(retrieval_min_sim) || !in_unit(cossim_decision_threshold) ||
      !in_unit(qa_answer_sim_threshold)) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must lie in (0, 1]");
  }
  if (retrieval_k == 0) throw Error(ErrorCode::InvalidArgument, "retrieval_k must be >= 1");
  if (questions_per_acu == 0) throw Error(ErrorCode::InvalidArgument, "questions_per_acu must be >= 1");
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
}

std::string_view evaluator_cli_name(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::CosSim: return "cossim";
    case EvaluatorKind::NLI: return "nli";
    case EvaluatorKind::QA: return "qa";
  }
  return "cossim";
}

EvaluatorKind parse_evaluator_kind(std::string_view name) {
  auto n = lower_ascii(name);
  if (n == "cossim") return EvaluatorKind::CosSim;
  if (n == "nli") return EvaluatorKind::NLI;
  if (n == "qa") return EvaluatorKind::QA;
  throw Error(ErrorCode::InvalidArgument, "unknown evaluator '" + std::string(name) + "'");
}

NliLabel parse_nli_label(std::string_view text) {
  auto t = lower_ascii(trim(text));
  if (t == "entailment") return NliLabel::entailment;
  if (t == "contradiction") return NliLabel::contradiction;
  if (t == "neutral") return NliLabel::neutral;
  throw Error(ErrorCode::NliParseError, "unknown NLI label '" + std::string(text) + "'");
}

std::string join_hit_texts(std::span<const RetrievalHit> hits) {
  std::string out;
  for (const auto& h : hits) {
    if (!out.empty()) out.push_back(' ');
    out += h.record.text;
  }
  return out;
}

NoveltyVerdict evaluate_cossim(const Acu& target, std::span<const RetrievalHit> hits,
                               const EvaluatorConfig& cfg) {
  NoveltyVerdict verdict{target.acu_id, true, EvaluatorKind::CosSim, evidence_from_hits(hits)};
  for (const auto& h : hits) {
    if (h.similarity >= cfg.cossim_decision_threshold) verdict.is_novel = false;
  }
  return verdict;
}

std::vector<NoveltyVerdict> evaluate_nli(std::span<const Acu> targets,
                                         std::span<const std::vector<RetrievalHit>> hits_per_target,
                                         LlmBackend& backend, const EvaluatorConfig& cfg) {
  check_aligned(targets.size(), hits_per_target.size());
  std::vector<NoveltyVerdict> verdicts;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    verdicts.push_back(novel_without_evidence(targets[i], EvaluatorKind::NLI));
    if (!hits_per_target[i].empty()) {
      verdicts[i].evidence = evidence_from_hits(hits_per_target[i]);
      pending.push_back(i);
    }
  }

  for (const auto& batch : batches_of(pending, cfg.batch_size)) {
    std::vector<NliPair> pairs;
    for (auto i : batch) pairs.push_back({join_hit_texts(hits_per_target[i]), targets[i].text});
    LlmRequest request{TemplateId::nli_batch, render_nli_prompt(pairs), cfg.model_name, 0.0};
    auto response = backend.complete(request);
    auto payload = payload_or(ErrorCode::NliParseError, response.raw_text, "NLI reply");
    if (!payload.contains("nli_results") || !payload["nli_results"].is_array()) {
      throw Error(ErrorCode::NliParseError, "NLI reply lacks an nli_results array");
    }
    std::vector<std::optional<NliLabel>> labels(batch.size());
    for (const auto& item : payload["nli_results"]) {
      if (!item.is_object() || !item.contains("id") || !item["id"].is_number_integer() ||
          !item.contains("nli") || !item["nli"].is_string()) {
        throw Error(ErrorCode::NliParseError, "malformed nli_results entry " + item.dump());
      }
      auto id = item["id"].get<long long>();
      if (id < 1 || id > static_cast<long long>(batch.size())) {
        throw Error(ErrorCode::NliParseError, "nli_results id " + std::to_string(id) + " out of range");
      }
      auto& slot = labels[static_cast<std::size_t>(id - 1)];
      if (slot) throw Error(ErrorCode::NliParseError, "duplicate nli_results id " + std::to_string(id));
      slot = parse_nli_label(item["nli"].get<std::string>());
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (!labels[b]) {
        throw Error(ErrorCode::NliParseError, "nli_results missing id " + std::to_string(b + 1));
      }
      auto& verdict = verdicts[batch[b]];
      verdict.evidence.nli_label = *labels[b];
      verdict.is_novel = *labels[b] != NliLabel::entailment;
    }
  }
  return verdicts;
}

std::vector<NoveltyVerdict> evaluate_qa(std::span<const Acu> targets,
                                        std::span<const std::vector<RetrievalHit>> hits_per_target,
                                        LlmBackend& backend, const Embedder& embedder,
                                        const EvaluatorConfig& cfg) {
  check_aligned(targets.size(), hits_per_target.size());
  std::vector<NoveltyVerdict> verdicts;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    verdicts.push_back(novel_without_evidence(targets[i], EvaluatorKind::QA));
    if (!hits_per_target[i].empty()) {
      verdicts[i].evidence = evidence_from_hits(hits_per_target[i]);
      pending.push_back(i);
    }
  }

  for (const auto& batch : batches_of(pending, cfg.batch_size)) {
    // Questions the target itself answers.
    std::vector<std::string> sentences;
    for (auto i : batch) sentences.push_back(targets[i].text);
    LlmRequest qg{TemplateId::qa_question_gen, render_question_gen_prompt(sentences),
                  cfg.model_name, 0.0};
    auto qg_payload =
        payload_or(ErrorCode::QgParseError, backend.complete(qg).raw_text, "question reply");
    if (!qg_payload.contains("questions_list") || !qg_payload["questions_list"].is_array() ||
        qg_payload["questions_list"].size() != batch.size()) {
      throw Error(ErrorCode::QgParseError, "questions_list must hold one array per sentence (" +
                                               std::to_string(batch.size()) + ")");
    }
    std::vector<QaItem> items;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto& qs = qg_payload["questions_list"][b];
      if (!qs.is_array() || qs.size() != cfg.questions_per_acu) {
        throw Error(ErrorCode::QgParseError, "sentence " + std::to_string(b + 1) + " needs " +
                                                 std::to_string(cfg.questions_per_acu) +
                                                 " questions");
      }
      QaItem item{join_hit_texts(hits_per_target[batch[b]]), {}};
      for (const auto& q : qs) {
        if (!q.is_string()) throw Error(ErrorCode::QgParseError, "question is not a string");
        item.questions.push_back(q.get<std::string>());
      }
      verdicts[batch[b]].evidence.questions = item.questions;
      items.push_back(std::move(item));
    }

    // Answers from the historical context, one consolidated sentence each.
    LlmRequest qa{TemplateId::qa_answering, render_answering_prompt(items), cfg.model_name, 0.0};
    auto qa_payload = payload_or(ErrorCode::QaParseError, backend.complete(qa).raw_text, "answer reply");
    if (!qa_payload.contains("answers") || !qa_payload["answers"].is_array() ||
        qa_payload["answers"].size() != batch.size()) {
      throw Error(ErrorCode::QaParseError, "answers must hold " + std::to_string(batch.size()) +
                                               " entries");
    }
    std::vector<std::string> answers;
    for (const auto& a : qa_payload["answers"]) {
      if (!a.is_string()) throw Error(ErrorCode::QaParseError, "answer is not a string");
      answers.push_back(a.get<std::string>());
    }

    std::vector<std::string> to_embed;
    for (auto i : batch) to_embed.push_back(targets[i].text);
    std::vector<std::size_t> answer_slot(batch.size(), 0);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (trim(answers[b]).empty()) continue;
      answer_slot[b] = to_embed.size();
      to_embed.push_back(answers[b]);
    }
    auto vectors = embedder.embed(to_embed);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      auto& verdict = verdicts[batch[b]];
      verdict.evidence.answer = answers[b];
      double sim = 0.0;
      if (answer_slot[b] != 0) sim = cosine_similarity(vectors[b], vectors[answer_slot[b]]);
      verdict.evidence.answer_similarity = sim;
      verdict.is_novel = !(sim >= cfg.qa_answer_sim_threshold);
    }
  }
  return verdicts;
}

}  // namespace novascore
