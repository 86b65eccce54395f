#pragma once

// Domain vocabulary shared by every stage of the novelty pipeline.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace novascore {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

// Accepts YYYY-MM-DD, optionally followed by THH:MM[:SS[.frac]] and a
// Z or +HH:MM / -HH:MM offset. Throws Error(ParseError).
Timestamp parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);

enum class DocumentRole { source, target };

std::string_view to_string(DocumentRole role);
std::optional<DocumentRole> parse_document_role(std::string_view text);

// One vocabulary for both binary (novel / non_novel) and three-level
// (novel / somewhat_redundant / absolute_redundant) corpora.
enum class GoldLabel { novel, non_novel, somewhat_redundant, absolute_redundant };

enum class LabelMode { graded, binary };

std::string_view to_string(GoldLabel label);
std::optional<GoldLabel> parse_gold_label(std::string_view text);

// graded: novel 1, somewhat_redundant 0.5, others 0.
// binary: novel 1, everything else 0.
double gold_label_numeric(GoldLabel label, LabelMode mode);

struct Document {
  std::string id;
  std::string cluster_id;
  std::optional<Timestamp> timestamp;
  std::optional<std::string> title;
  std::string text;
  DocumentRole role = DocumentRole::target;
  std::optional<GoldLabel> gold_label;
};

// Tracks ids seen so far in one corpus.
class DocumentRegistry {
 public:
  // Throws Error(DuplicateId) if the id was already registered.
  void add(const std::string& id);
  bool contains(const std::string& id) const { return ids_.count(id) != 0; }

 private:
  std::unordered_set<std::string> ids_;
};

// Returns the document unchanged when its invariants hold. The registry,
// when given, receives the id.
Document validate_document(Document doc, DocumentRegistry* registry = nullptr,
                           bool require_timestamp = false);

struct Acu {
  std::string acu_id;
  std::string doc_id;
  std::size_t ordinal = 0;
  std::string text;
  bool salient = false;
};

std::string make_acu_id(std::string_view doc_id, std::size_t ordinal);

enum class Correctness { correct, incorrect };
enum class Redundancy { redundant, not_redundant };
enum class NoveltyAnnotation { novel, not_novel };
enum class SalienceAnnotation { salient, non_salient };

// Human ACU label record. Novelty and salience are only judged for
// correct, non-redundant units.
struct AcuAnnotation {
  Correctness correctness = Correctness::correct;
  Redundancy redundancy = Redundancy::not_redundant;
  std::optional<NoveltyAnnotation> novelty;
  std::optional<SalienceAnnotation> salience;

  bool valid() const;
};

// Parameters of the capped cubic that weights non-salient ACUs.
struct WeightParams {
  static constexpr double w_s = 1.0;

  double alpha = 0.0;
  double beta = 0.5;
  double gamma = 1.0;

  // Throws Error(InvalidArgument) when alpha < 0 or any value is non-finite.
  void validate() const;

  // No adjustment: every ACU weighs 1.
  static constexpr WeightParams unadjusted() { return {0.0, 0.5, 1.0}; }
  static constexpr WeightParams salience_adjusted() { return {1.0, 0.5, 0.7}; }

  friend bool operator==(const WeightParams&, const WeightParams&) = default;
};

enum class EvaluatorKind { CosSim, NLI, QA };

std::string_view to_string(EvaluatorKind kind);

enum class NliLabel { entailment, contradiction, neutral };

std::string_view to_string(NliLabel label);

struct HitEvidence {
  std::string acu_id;
  std::string doc_id;
  std::string text;
  double similarity = 0.0;
};

struct NoveltyEvidence {
  std::vector<HitEvidence> hits;
  std::optional<double> max_similarity;
  std::optional<NliLabel> nli_label;
  std::vector<std::string> questions;
  std::optional<std::string> answer;
  std::optional<double> answer_similarity;
};

struct NoveltyVerdict {
  std::string acu_id;
  bool is_novel = true;
  EvaluatorKind evaluator = EvaluatorKind::CosSim;
  NoveltyEvidence evidence;
};

struct AcuScore {
  std::string acu_id;
  bool is_novel = false;
  bool salient = false;
  double weight = 0.0;
};

struct DocumentScore {
  std::string doc_id;
  double novascore = 0.0;
  std::size_t n_acus = 0;
  double salience_ratio = 0.0;
  double w_ns_used = 1.0;
  std::vector<AcuScore> per_acu;
};

}  // namespace novascore
