#pragma once

// End-to-end orchestration: extract, retrieve, judge novelty, aggregate,
// bank; plus run configuration and report serialization.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "novascore/acubank.hpp"
#include "novascore/corpus.hpp"
#include "novascore/embedding.hpp"
#include "novascore/error.hpp"
#include "novascore/extraction.hpp"
#include "novascore/llm_backend.hpp"
#include "novascore/novelty.hpp"
#include "novascore/scoring.hpp"
#include "novascore/stats.hpp"

namespace novascore {

enum class BackendKind { scripted, remote };

struct BackendConfig {
  BackendKind kind = BackendKind::scripted;
  std::optional<std::string> endpoint;
  std::string model = "gpt-4o";
  std::optional<std::string> script;
};

struct RunFlags {
  bool bank_scored_targets = true;
  bool bank_non_novel = true;
};

struct RunConfig {
  EvaluatorConfig evaluator;
  WeightParams weights = WeightParams::unadjusted();
  EmbedderConfig embedder;
  BackendConfig backend;
  std::string bank_path;
  Layout layout = Layout::clustered;
  RunFlags flags;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_acus_per_doc;
  std::optional<ExtractionExample> extraction_example;
  // Clusters processed concurrently (clustered layout only).
  std::size_t jobs = 1;

  void validate() const;
};

nlohmann::ordered_json config_to_json(const RunConfig& cfg);
// Relative file paths (backend.script) resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& cfg);

struct ScoredDocument {
  std::string doc_id;
  std::string cluster_id;
  std::optional<GoldLabel> gold_label;
  DocumentScore score;
  std::vector<Acu> acus;
  std::vector<NoveltyVerdict> verdicts;
  std::string summary;
  std::vector<std::string> warnings;
};

struct SkippedDocument {
  std::string doc_id;
  std::string cluster_id;
  Action action = Action::score_then_bank;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
};

struct StageTiming {
  double extraction = 0.0;
  double embedding = 0.0;
  double retrieval = 0.0;
  double evaluation = 0.0;
  double banking = 0.0;
  double total = 0.0;
};

struct RunReport {
  static constexpr int kFormatVersion = 1;

  std::size_t n_plan_steps = 0;
  std::size_t n_bank_only = 0;
  std::vector<ScoredDocument> documents;
  std::vector<SkippedDocument> skipped;
  std::map<std::string, stats::CorrelationResult> correlations;
  std::map<std::string, std::string> correlation_errors;
  std::map<ModuleTag, TokenTotals> token_ledger;
  StageTiming timing;
  nlohmann::ordered_json config;
};

class Pipeline {
 public:
  Pipeline(RunConfig cfg, LlmBackend& backend, const Embedder& embedder, AcuBank& bank);

  // Scores one target against the current state of its database, then banks
  // its ACUs when the run flags allow. Module errors propagate with the
  // document id attached.
  ScoredDocument process_document(const Document& doc, const std::string& database);

  // Extracts and banks every ACU of a history-only document. Returns false
  // when the document was already banked.
  bool bank_document(const Document& doc, const std::string& database);

  // Executes the processing plan in order. Backend failures and empty
  // documents become skipped entries; bank errors abort the run.
  RunReport run_corpus(const Corpus& corpus);

  StageTiming timing() const;
  const RunConfig& config() const { return cfg_; }

 private:
  std::vector<EmbeddingVector> embed_acus(const std::vector<Acu>& acus);
  void add_time(double StageTiming::*field, double seconds);

  RunConfig cfg_;
  LlmBackend& backend_;
  const Embedder& embedder_;
  AcuBank& bank_;
  ExtractionOptions extraction_options_;
  mutable std::mutex timing_mu_;
  StageTiming timing_;
};

// Correlations between scores and gold labels. Metric names:
// point_biserial (binary labels), pearson, spearman, kendall (graded
// labels). Metrics that cannot be computed land in `errors`.
struct CorrelationSet {
  std::map<std::string, stats::CorrelationResult> results;
  std::map<std::string, std::string> errors;
};

CorrelationSet compute_correlations(const std::vector<std::pair<double, GoldLabel>>& labeled,
                                    const std::vector<std::string>& metrics);

// "pb" is accepted as an alias for point_biserial.
std::string canonical_metric_name(const std::string& name);

inline const std::vector<std::string>& default_metrics() {
  static const std::vector<std::string> kMetrics{"point_biserial", "pearson", "spearman", "kendall"};
  return kMetrics;
}

nlohmann::ordered_json score_to_json(const ScoredDocument& doc);
nlohmann::ordered_json report_to_json(const RunReport& report);

// One DocumentScore per line, per-ACU breakdown included.
void write_scores_jsonl(std::ostream& out, const RunReport& report);
// Writes report.json and scores.jsonl into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunReport& report);

// Parameter-independent content of one scores.jsonl line.
struct StoredScore {
  std::string doc_id;
  std::string cluster_id;
  std::optional<GoldLabel> gold_label;
  double novascore = 0.0;
  std::vector<AcuOutcome> outcomes;
};

std::vector<StoredScore> read_scores_jsonl(const std::filesystem::path& path);

}  // namespace novascore
