#include "novascore/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace novascore {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "config: " + what);
}

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key) || obj[key].is_null()) return;
  try {
    out = obj[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const nlohmann::json& obj, const char* key, std::optional<T>& out) {
  if (!obj.contains(key) || obj[key].is_null()) return;
  T value{};
  read_field(obj, key, value);
  out = value;
}

void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
    if (!known) config_error("unknown field '" + key + "' in " + where);
  }
}

}  // namespace

void RunConfig::validate() const {
  evaluator.validate();
  weights.validate();
  embedder.validate();
  if (backend.kind == BackendKind::remote && (!backend.endpoint || backend.endpoint->empty())) {
    config_error("remote backend requires an endpoint");
  }
  if (jobs == 0) config_error("jobs must be >= 1");
  if (max_acus_per_doc && *max_acus_per_doc == 0) config_error("max_acus_per_doc must be >= 1");
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["evaluator"] = {
      {"kind", evaluator_cli_name(cfg.evaluator.kind)},
      {"retrieval_k", cfg.evaluator.retrieval_k},
      {"retrieval_min_sim", cfg.evaluator.retrieval_min_sim},
      {"cossim_decision_threshold", cfg.evaluator.cossim_decision_threshold},
      {"qa_answer_sim_threshold", cfg.evaluator.qa_answer_sim_threshold},
      {"questions_per_acu", cfg.evaluator.questions_per_acu},
      {"batch_size", cfg.evaluator.batch_size},
  };
  j["weights"] = {{"alpha", cfg.weights.alpha}, {"beta", cfg.weights.beta}, {"gamma", cfg.weights.gamma}};
  nlohmann::ordered_json emb;
  emb["kind"] = cfg.embedder.kind == EmbedderKind::remote ? "remote" : "deterministic_hash";
  if (cfg.embedder.endpoint) emb["endpoint"] = *cfg.embedder.endpoint;
  if (cfg.embedder.model_name) emb["model_name"] = *cfg.embedder.model_name;
  emb["dim"] = cfg.embedder.dim;
  emb["batch_size"] = cfg.embedder.batch_size;
  j["embedder"] = emb;
  nlohmann::ordered_json be;
  be["kind"] = cfg.backend.kind == BackendKind::remote ? "remote" : "scripted";
  if (cfg.backend.endpoint) be["endpoint"] = *cfg.backend.endpoint;
  be["model"] = cfg.backend.model;
  be["temperature"] = 0.0;
  j["backend"] = be;
  j["bank_path"] = cfg.bank_path;
  j["layout"] = to_string(cfg.layout);
  j["flags"] = {{"bank_scored_targets", cfg.flags.bank_scored_targets},
                {"bank_non_novel", cfg.flags.bank_non_novel}};
  j["seed"] = cfg.seed;
  j["max_acus_per_doc"] = cfg.max_acus_per_doc ? nlohmann::ordered_json(*cfg.max_acus_per_doc)
                                               : nlohmann::ordered_json(nullptr);
  j["prompt_template_version"] = kPromptTemplateVersion;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  check_keys(j,
             {"evaluator", "weights", "embedder", "backend", "bank_path", "layout", "flags", "seed",
              "max_acus_per_doc", "extraction_example", "jobs", "prompt_template_version"},
             "config");
  RunConfig cfg;
  if (j.contains("evaluator")) {
    const auto& e = j["evaluator"];
    check_keys(e,
               {"kind", "retrieval_k", "retrieval_min_sim", "cossim_decision_threshold",
                "qa_answer_sim_threshold", "questions_per_acu", "batch_size"},
               "evaluator");
    std::string kind = std::string(evaluator_cli_name(cfg.evaluator.kind));
    read_field(e, "kind", kind);
    cfg.evaluator.kind = parse_evaluator_kind(kind);
    read_field(e, "retrieval_k", cfg.evaluator.retrieval_k);
    read_field(e, "retrieval_min_sim", cfg.evaluator.retrieval_min_sim);
    read_field(e, "cossim_decision_threshold", cfg.evaluator.cossim_decision_threshold);
    read_field(e, "qa_answer_sim_threshold", cfg.evaluator.qa_answer_sim_threshold);
    read_field(e, "questions_per_acu", cfg.evaluator.questions_per_acu);
    read_field(e, "batch_size", cfg.evaluator.batch_size);
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    check_keys(w, {"alpha", "beta", "gamma"}, "weights");
    read_field(w, "alpha", cfg.weights.alpha);
    read_field(w, "beta", cfg.weights.beta);
    read_field(w, "gamma", cfg.weights.gamma);
  }
  if (j.contains("embedder")) {
    const auto& e = j["embedder"];
    check_keys(e, {"kind", "endpoint", "model_name", "dim", "batch_size"}, "embedder");
    std::string kind = "deterministic_hash";
    read_field(e, "kind", kind);
    if (kind == "remote") {
      cfg.embedder.kind = EmbedderKind::remote;
    } else if (kind == "deterministic_hash") {
      cfg.embedder.kind = EmbedderKind::deterministic_hash;
    } else {
      config_error("unknown embedder kind '" + kind + "'");
    }
    read_optional(e, "endpoint", cfg.embedder.endpoint);
    read_optional(e, "model_name", cfg.embedder.model_name);
    read_field(e, "dim", cfg.embedder.dim);
    read_field(e, "batch_size", cfg.embedder.batch_size);
  }
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    check_keys(b, {"kind", "endpoint", "model", "script", "temperature"}, "backend");
    std::string kind = "scripted";
    read_field(b, "kind", kind);
    if (kind == "remote") {
      cfg.backend.kind = BackendKind::remote;
    } else if (kind == "scripted") {
      cfg.backend.kind = BackendKind::scripted;
    } else {
      config_error("unknown backend kind '" + kind + "'");
    }
    if (b.contains("temperature") && !(b["temperature"].is_number() && b["temperature"] == 0)) {
      config_error("backend temperature is fixed at 0");
    }
    read_optional(b, "endpoint", cfg.backend.endpoint);
    read_field(b, "model", cfg.backend.model);
    read_optional(b, "script", cfg.backend.script);
    if (cfg.backend.script && fs::path(*cfg.backend.script).is_relative() && !base_dir.empty()) {
      cfg.backend.script = (base_dir / *cfg.backend.script).string();
    }
  }
  read_field(j, "bank_path", cfg.bank_path);
  if (!cfg.bank_path.empty() && fs::path(cfg.bank_path).is_relative() && !base_dir.empty()) {
    cfg.bank_path = (base_dir / cfg.bank_path).string();
  }
  if (j.contains("layout")) {
    std::string layout;
    read_field(j, "layout", layout);
    cfg.layout = parse_layout(layout);
  }
  if (j.contains("flags")) {
    const auto& f = j["flags"];
    check_keys(f, {"bank_scored_targets", "bank_non_novel"}, "flags");
    read_field(f, "bank_scored_targets", cfg.flags.bank_scored_targets);
    read_field(f, "bank_non_novel", cfg.flags.bank_non_novel);
  }
  read_field(j, "seed", cfg.seed);
  read_optional(j, "max_acus_per_doc", cfg.max_acus_per_doc);
  read_field(j, "jobs", cfg.jobs);
  if (j.contains("extraction_example") && !j["extraction_example"].is_null()) {
    const auto& ex = j["extraction_example"];
    check_keys(ex, {"document", "output"}, "extraction_example");
    ExtractionExample example;
    read_field(ex, "document", example.document);
    if (ex.contains("output") && !ex["output"].is_string()) {
      example.output = ex["output"].dump();
    } else {
      read_field(ex, "output", example.output);
    }
    cfg.extraction_example = example;
  }
  cfg.evaluator.model_name = cfg.backend.model;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& cfg) {
  if (cfg.kind == BackendKind::remote) {
    if (!cfg.endpoint) throw Error(ErrorCode::InvalidArgument, "remote backend requires an endpoint");
    return std::make_unique<RemoteChatBackend>(*cfg.endpoint);
  }
  auto scripted = std::make_unique<ScriptedBackend>();
  if (cfg.script) scripted->load_script(fs::path(*cfg.script));
  return scripted;
}

Pipeline::Pipeline(RunConfig cfg, LlmBackend& backend, const Embedder& embedder, AcuBank& bank)
    : cfg_(std::move(cfg)), backend_(backend), embedder_(embedder), bank_(bank) {
  cfg_.validate();
  cfg_.evaluator.model_name = cfg_.backend.model;
  extraction_options_.model_name = cfg_.backend.model;
  extraction_options_.max_acus_per_doc = cfg_.max_acus_per_doc;
  if (cfg_.extraction_example) extraction_options_.example = *cfg_.extraction_example;
}

void Pipeline::add_time(double StageTiming::*field, double seconds) {
  std::lock_guard lock(timing_mu_);
  timing_.*field += seconds;
}

StageTiming Pipeline::timing() const {
  std::lock_guard lock(timing_mu_);
  return timing_;
}

std::vector<EmbeddingVector> Pipeline::embed_acus(const std::vector<Acu>& acus) {
  auto start = Clock::now();
  std::vector<std::string> texts;
  texts.reserve(acus.size());
  for (const auto& a : acus) texts.push_back(a.text);
  auto vectors = embedder_.embed(texts);
  add_time(&StageTiming::embedding, seconds_since(start));
  return vectors;
}

bool Pipeline::bank_document(const Document& doc, const std::string& database) {
  if (bank_.contains_doc(database, doc.id)) return false;
  auto start = Clock::now();
  auto extraction = extract(doc, backend_, extraction_options_);
  add_time(&StageTiming::extraction, seconds_since(start));
  auto vectors = embed_acus(extraction.acus);
  start = Clock::now();
  std::vector<NewAcuRecord> records;
  for (std::size_t i = 0; i < extraction.acus.size(); ++i) {
    const auto& a = extraction.acus[i];
    records.push_back({a.acu_id, a.doc_id, a.text, std::move(vectors[i])});
  }
  bank_.insert(database, std::move(records));
  add_time(&StageTiming::banking, seconds_since(start));
  return true;
}

ScoredDocument Pipeline::process_document(const Document& doc, const std::string& database) {
  try {
    ScoredDocument out;
    out.doc_id = doc.id;
    out.cluster_id = doc.cluster_id;
    out.gold_label = doc.gold_label;

    auto start = Clock::now();
    auto extraction = extract(doc, backend_, extraction_options_);
    add_time(&StageTiming::extraction, seconds_since(start));
    out.summary = extraction.summary;
    out.warnings = extraction.warnings;

    auto vectors = embed_acus(extraction.acus);

    start = Clock::now();
    SearchOptions search{cfg_.evaluator.retrieval_k, cfg_.evaluator.retrieval_min_sim, doc.id};
    std::vector<std::vector<RetrievalHit>> hits;
    hits.reserve(vectors.size());
    for (const auto& v : vectors) hits.push_back(bank_.search_top_k(database, v, search));
    add_time(&StageTiming::retrieval, seconds_since(start));

    start = Clock::now();
    const auto& acus = extraction.acus;
    switch (cfg_.evaluator.kind) {
      case EvaluatorKind::CosSim:
        for (std::size_t i = 0; i < acus.size(); ++i) {
          out.verdicts.push_back(evaluate_cossim(acus[i], hits[i], cfg_.evaluator));
        }
        break;
      case EvaluatorKind::NLI:
        out.verdicts = evaluate_nli(acus, hits, backend_, cfg_.evaluator);
        break;
      case EvaluatorKind::QA:
        out.verdicts = evaluate_qa(acus, hits, backend_, embedder_, cfg_.evaluator);
        break;
    }
    add_time(&StageTiming::evaluation, seconds_since(start));

    std::vector<bool> salience_flags;
    for (const auto& a : acus) salience_flags.push_back(a.salient);
    std::unique_ptr<bool[]> flags(new bool[salience_flags.size()]);
    for (std::size_t i = 0; i < salience_flags.size(); ++i) flags[i] = salience_flags[i];
    out.score = novascore(doc.id, out.verdicts, std::span<const bool>(flags.get(), salience_flags.size()),
                          cfg_.weights);

    if (cfg_.flags.bank_scored_targets && !bank_.contains_doc(database, doc.id)) {
      start = Clock::now();
      std::vector<NewAcuRecord> records;
      for (std::size_t i = 0; i < acus.size(); ++i) {
        if (!cfg_.flags.bank_non_novel && !out.verdicts[i].is_novel) continue;
        records.push_back({acus[i].acu_id, acus[i].doc_id, acus[i].text, std::move(vectors[i])});
      }
      if (records.empty()) {
        bank_.create_cluster(database);
      } else {
        bank_.insert(database, std::move(records));
      }
      add_time(&StageTiming::banking, seconds_since(start));
    }
    out.acus = extraction.acus;
    return out;
  } catch (const Error& e) {
    throw Error(e.code(), "document '" + doc.id + "': " + e.detail());
  }
}

namespace {

struct StepOutcome {
  std::optional<ScoredDocument> scored;
  std::optional<SkippedDocument> skipped;
  bool banked = false;
};

bool skippable(ErrorCode code) { return is_backend_error(code) || code == ErrorCode::EmptyDocument; }

}  // namespace

RunReport Pipeline::run_corpus(const Corpus& corpus) {
  const auto run_start = Clock::now();
  const auto plan = processing_plan(corpus);
  std::vector<StepOutcome> outcomes(plan.size());

  auto run_step = [&](std::size_t i) {
    const auto& step = plan[i];
    const auto& doc = corpus.documents[step.doc_index];
    try {
      if (step.action == Action::bank_only) {
        bank_document(doc, step.database);
        outcomes[i].banked = true;
      } else {
        outcomes[i].scored = process_document(doc, step.database);
      }
    } catch (const Error& e) {
      if (!skippable(e.code())) throw;
      outcomes[i].skipped = SkippedDocument{doc.id, doc.cluster_id, step.action, e.code(), e.detail()};
    }
  };

  // Every database starts out existing, so empty history is searchable.
  for (const auto& step : plan) bank_.create_cluster(step.database);

  if (cfg_.jobs <= 1 || corpus.layout == Layout::chronological) {
    for (std::size_t i = 0; i < plan.size(); ++i) run_step(i);
  } else {
    // Databases are independent; steps within one stay sequential.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      auto [it, inserted] = groups.try_emplace(plan[i].database);
      if (inserted) order.push_back(plan[i].database);
      it->second.push_back(i);
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr failure;
    auto worker = [&] {
      while (true) {
        std::size_t g = next.fetch_add(1);
        if (g >= order.size()) return;
        {
          std::lock_guard lock(error_mu);
          if (failure) return;
        }
        try {
          for (auto i : groups[order[g]]) run_step(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < std::min(cfg_.jobs, order.size()); ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunReport report;
  report.n_plan_steps = plan.size();
  std::vector<std::pair<double, GoldLabel>> labeled;
  for (auto& o : outcomes) {
    if (o.banked) ++report.n_bank_only;
    if (o.skipped) report.skipped.push_back(std::move(*o.skipped));
    if (o.scored) {
      if (o.scored->gold_label) labeled.emplace_back(o.scored->score.novascore, *o.scored->gold_label);
      report.documents.push_back(std::move(*o.scored));
    }
  }
  if (!labeled.empty()) {
    auto set = compute_correlations(labeled, default_metrics());
    report.correlations = std::move(set.results);
    report.correlation_errors = std::move(set.errors);
  }
  report.token_ledger = backend_.ledger().snapshot();
  add_time(&StageTiming::total, seconds_since(run_start));
  report.timing = timing();
  report.config = config_to_json(cfg_);
  return report;
}

std::string canonical_metric_name(const std::string& name) {
  if (name == "pb" || name == "point_biserial") return "point_biserial";
  if (name == "pearson" || name == "spearman" || name == "kendall") return name;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "'");
}

CorrelationSet compute_correlations(const std::vector<std::pair<double, GoldLabel>>& labeled,
                                    const std::vector<std::string>& metrics) {
  CorrelationSet set;
  std::vector<double> scores, graded;
  std::vector<int> binary;
  for (const auto& [score, label] : labeled) {
    scores.push_back(score);
    graded.push_back(gold_label_numeric(label, LabelMode::graded));
    binary.push_back(gold_label_numeric(label, LabelMode::binary) == 1.0 ? 1 : 0);
  }
  for (const auto& raw_name : metrics) {
    const auto name = canonical_metric_name(raw_name);
    try {
      if (name == "point_biserial") {
        set.results[name] = stats::point_biserial(binary, scores);
      } else if (name == "pearson") {
        set.results[name] = stats::pearson(scores, graded);
      } else if (name == "spearman") {
        set.results[name] = stats::spearman(scores, graded);
      } else {
        set.results[name] = stats::kendall(scores, graded);
      }
    } catch (const Error& e) {
      set.errors[name] = e.detail();
    }
  }
  return set;
}

namespace {

nlohmann::ordered_json evidence_to_json(const NoveltyVerdict& v) {
  nlohmann::ordered_json e;
  e["evaluator"] = to_string(v.evaluator);
  auto hits = nlohmann::ordered_json::array();
  for (const auto& h : v.evidence.hits) {
    nlohmann::ordered_json hj;
    hj["acu_id"] = h.acu_id;
    hj["doc_id"] = h.doc_id;
    hj["similarity"] = h.similarity;
    hits.push_back(hj);
  }
  e["hits"] = hits;
  if (v.evidence.max_similarity) e["max_similarity"] = *v.evidence.max_similarity;
  if (v.evidence.nli_label) e["nli_label"] = to_string(*v.evidence.nli_label);
  if (!v.evidence.questions.empty()) e["questions"] = v.evidence.questions;
  if (v.evidence.answer) e["answer"] = *v.evidence.answer;
  if (v.evidence.answer_similarity) e["answer_similarity"] = *v.evidence.answer_similarity;
  return e;
}

}  // namespace

nlohmann::ordered_json score_to_json(const ScoredDocument& doc) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["cluster"] = doc.cluster_id;
  j["label"] = doc.gold_label ? nlohmann::ordered_json(to_string(*doc.gold_label))
                              : nlohmann::ordered_json(nullptr);
  j["novascore"] = doc.score.novascore;
  j["n_acus"] = doc.score.n_acus;
  j["salience_ratio"] = doc.score.salience_ratio;
  j["w_ns"] = doc.score.w_ns_used;
  auto per_acu = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < doc.score.per_acu.size(); ++i) {
    const auto& a = doc.score.per_acu[i];
    nlohmann::ordered_json aj;
    aj["acu_id"] = a.acu_id;
    if (i < doc.acus.size()) aj["text"] = doc.acus[i].text;
    aj["is_novel"] = a.is_novel;
    aj["salient"] = a.salient;
    aj["weight"] = a.weight;
    if (i < doc.verdicts.size()) aj["evidence"] = evidence_to_json(doc.verdicts[i]);
    per_acu.push_back(aj);
  }
  j["per_acu"] = per_acu;
  return j;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["format_version"] = RunReport::kFormatVersion;
  nlohmann::ordered_json summary;
  summary["n_plan_steps"] = report.n_plan_steps;
  summary["n_bank_only"] = report.n_bank_only;
  summary["n_scored"] = report.documents.size();
  summary["n_skipped"] = report.skipped.size();
  auto skipped = nlohmann::ordered_json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"doc_id", s.doc_id},
                       {"cluster", s.cluster_id},
                       {"action", to_string(s.action)},
                       {"error", to_string(s.code)},
                       {"message", s.message}});
  }
  summary["skipped"] = skipped;
  if (!report.documents.empty()) {
    double mean = 0.0;
    for (const auto& d : report.documents) mean += d.score.novascore;
    summary["mean_novascore"] = mean / static_cast<double>(report.documents.size());
  }
  j["summary"] = summary;

  nlohmann::ordered_json corr = nlohmann::ordered_json::object();
  for (const auto& [name, r] : report.correlations) {
    corr[name] = {{"statistic", r.statistic},
                  {"p_value", r.p_value},
                  {"n", r.n},
                  {"method", stats::to_string(r.method)},
                  {"strength", stats::to_string(stats::classify_strength(r.statistic, r.method))}};
  }
  j["correlations"] = corr;
  nlohmann::ordered_json corr_err = nlohmann::ordered_json::object();
  for (const auto& [name, msg] : report.correlation_errors) corr_err[name] = msg;
  j["correlation_errors"] = corr_err;

  nlohmann::ordered_json ledger = nlohmann::ordered_json::object();
  TokenTotals sum;
  for (auto tag : {ModuleTag::extraction_salience, ModuleTag::nli_evaluator, ModuleTag::qa_evaluator}) {
    TokenTotals t;
    if (auto it = report.token_ledger.find(tag); it != report.token_ledger.end()) t = it->second;
    ledger[std::string(to_string(tag))] = {{"prompt_tokens", t.prompt_tokens},
                                           {"completion_tokens", t.completion_tokens},
                                           {"total_tokens", t.total()},
                                           {"calls", t.calls}};
    sum.prompt_tokens += t.prompt_tokens;
    sum.completion_tokens += t.completion_tokens;
    sum.calls += t.calls;
  }
  ledger["total"] = {{"prompt_tokens", sum.prompt_tokens},
                     {"completion_tokens", sum.completion_tokens},
                     {"total_tokens", sum.total()},
                     {"calls", sum.calls}};
  j["token_ledger"] = ledger;
  j["config"] = report.config;
  j["timing"] = {{"extraction_seconds", report.timing.extraction},
                 {"embedding_seconds", report.timing.embedding},
                 {"retrieval_seconds", report.timing.retrieval},
                 {"evaluation_seconds", report.timing.evaluation},
                 {"banking_seconds", report.timing.banking},
                 {"total_seconds", report.timing.total}};
  return j;
}

void write_scores_jsonl(std::ostream& out, const RunReport& report) {
  for (const auto& doc : report.documents) out << score_to_json(doc).dump() << '\n';
}

void write_run_outputs(const fs::path& dir, const RunReport& report) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "scores.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "scores.jsonl").string());
    write_scores_jsonl(out, report);
  }
  std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / "report.json").string());
  out << report_to_json(report).dump(2) << '\n';
}

std::vector<StoredScore> read_scores_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scores file " + path.string());
  std::vector<StoredScore> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      auto j = nlohmann::json::parse(line);
      StoredScore s;
      s.doc_id = j.at("doc_id").get<std::string>();
      s.cluster_id = j.value("cluster", "");
      if (j.contains("label") && !j["label"].is_null()) {
        auto text = j["label"].get<std::string>();
        auto label = parse_gold_label(text);
        if (!label) throw Error(ErrorCode::UnknownLabel, where + ": unknown label '" + text + "'");
        s.gold_label = *label;
      }
      s.novascore = j.at("novascore").get<double>();
      for (const auto& a : j.at("per_acu")) {
        s.outcomes.push_back(
            {a.at("acu_id").get<std::string>(), a.at("is_novel").get<bool>(), a.at("salient").get<bool>()});
      }
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace novascore
