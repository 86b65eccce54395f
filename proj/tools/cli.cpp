#include "novascore/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "novascore/acubank.hpp"
#include "novascore/corpus.hpp"
#include "novascore/embedding.hpp"
#include "novascore/error.hpp"
#include "novascore/pipeline.hpp"
#include "novascore/scoring.hpp"
#include "novascore/stats.hpp"

namespace novascore::cli {

namespace fs = std::filesystem;

namespace {

// Bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError("empty item in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

Range usage_range(const std::string& flag, const std::string& text) {
  try {
    return parse_range(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

struct RunOptions {
  std::string corpus;
  std::string bank;
  std::string config;
  std::string layout;
  std::string script;
  std::string evaluator;
  std::size_t jobs = 0;
  std::string out;
};

RunConfig resolve_config(const RunOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  cfg.bank_path = o.bank;
  if (!o.layout.empty()) {
    try {
      cfg.layout = parse_layout(o.layout);
    } catch (const Error& e) {
      throw UsageError(std::string("--layout: ") + e.what());
    }
  }
  if (!o.evaluator.empty()) {
    try {
      cfg.evaluator.kind = parse_evaluator_kind(o.evaluator);
    } catch (const Error& e) {
      throw UsageError(std::string("--evaluator: ") + e.what());
    }
  }
  if (!o.script.empty()) {
    cfg.backend.kind = BackendKind::scripted;
    cfg.backend.script = o.script;
  }
  if (o.jobs > 0) cfg.jobs = o.jobs;
  cfg.validate();
  return cfg;
}

AcuBank open_bank(const fs::path& dir) {
  if (fs::exists(dir / std::string(AcuBank::kManifestName))) return AcuBank::load(dir);
  return AcuBank();
}

int cmd_index(const RunOptions& o, std::ostream& out) {
  auto cfg = resolve_config(o);
  auto corpus = load_corpus(o.corpus, cfg.layout);
  auto backend = make_backend(cfg.backend);
  auto embedder = make_embedder(cfg.embedder);
  auto bank = open_bank(cfg.bank_path);
  Pipeline pipeline(cfg, *backend, *embedder, bank);

  std::size_t banked = 0, already = 0;
  for (const auto& step : processing_plan(corpus)) {
    if (step.action != Action::bank_only) continue;
    if (pipeline.bank_document(corpus.documents[step.doc_index], step.database)) {
      ++banked;
    } else {
      ++already;
    }
  }
  auto manifest = bank.persist(cfg.bank_path);
  nlohmann::ordered_json summary;
  summary["banked_documents"] = banked;
  summary["already_banked"] = already;
  summary["databases"] = manifest.databases;
  out << summary.dump() << '\n';
  return kOk;
}

int cmd_score(const RunOptions& o, std::ostream& out) {
  auto cfg = resolve_config(o);
  auto corpus = load_corpus(o.corpus, cfg.layout);
  auto backend = make_backend(cfg.backend);
  auto embedder = make_embedder(cfg.embedder);
  auto bank = open_bank(cfg.bank_path);
  Pipeline pipeline(cfg, *backend, *embedder, bank);
  auto report = pipeline.run_corpus(corpus);
  write_run_outputs(o.out, report);
  bank.persist(cfg.bank_path);
  nlohmann::ordered_json summary;
  summary["scored"] = report.documents.size();
  summary["skipped"] = report.skipped.size();
  summary["bank_only"] = report.n_bank_only;
  summary["out"] = o.out;
  out << summary.dump() << '\n';
  return kOk;
}

int cmd_eval_corr(const std::string& scores_path, const std::string& metrics_text, const std::string& out_path,
                  std::ostream& out, std::ostream& err) {
  std::vector<std::string> metrics;
  for (const auto& m : split_list(metrics_text)) {
    try {
      metrics.push_back(canonical_metric_name(m));
    } catch (const Error& e) {
      throw UsageError(std::string("--metrics: ") + e.what());
    }
  }
  auto stored = read_scores_jsonl(scores_path);
  std::vector<std::pair<double, GoldLabel>> labeled;
  for (const auto& s : stored) {
    if (s.gold_label) labeled.emplace_back(s.novascore, *s.gold_label);
  }
  if (labeled.empty()) {
    throw Error(ErrorCode::DegenerateLabels, scores_path + " has no documents with gold labels");
  }
  auto set = compute_correlations(labeled, metrics);
  nlohmann::ordered_json j;
  j["n_documents"] = stored.size();
  j["n_labeled"] = labeled.size();
  nlohmann::ordered_json corr = nlohmann::ordered_json::object();
  for (const auto& name : metrics) {
    auto it = set.results.find(name);
    if (it == set.results.end()) continue;
    const auto& r = it->second;
    corr[name] = {{"statistic", r.statistic},
                  {"p_value", r.p_value},
                  {"n", r.n},
                  {"strength", stats::to_string(stats::classify_strength(r.statistic, r.method))}};
  }
  j["correlations"] = corr;
  nlohmann::ordered_json errors = nlohmann::ordered_json::object();
  for (const auto& [name, msg] : set.errors) errors[name] = msg;
  j["errors"] = errors;
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path);
    f << j.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
  if (!set.errors.empty()) {
    for (const auto& [name, msg] : set.errors) err << "error: " << name << ": " << msg << '\n';
    return kDataError;
  }
  return kOk;
}

int cmd_grid_search(const std::string& scores_path, const GridSpec& spec, const std::string& out_path,
                    std::ostream& out) {
  auto stored = read_scores_jsonl(scores_path);
  std::vector<const StoredScore*> labeled;
  for (const auto& s : stored) {
    if (s.gold_label) labeled.push_back(&s);
  }
  ScoreFn fn = [&](const WeightParams& params) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(labeled.size());
    for (const auto* s : labeled) {
      auto score = aggregate(s->doc_id, s->outcomes, params);
      pairs.emplace_back(score.novascore, gold_label_numeric(*s->gold_label, LabelMode::graded));
    }
    return pairs;
  };
  auto result = grid_search(fn, spec);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path);
    write_surface_csv(f, result);
  }
  nlohmann::ordered_json j;
  j["objective"] = to_string(spec.objective);
  j["n_labeled"] = labeled.size();
  j["n_points"] = result.surface.size();
  j["best"] = {{"alpha", result.best.alpha}, {"beta", result.best.beta}, {"gamma", result.best.gamma}};
  j["best_statistic"] = result.best_statistic;
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_bench(const std::string& sizes_text, std::size_t dim, std::size_t queries, const std::string& out_path,
              std::ostream& out) {
  if (sizes_text.empty()) throw UsageError("--sizes must list at least one bank size");
  std::vector<std::size_t> sizes;
  for (const auto& item : split_list(sizes_text)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v == 0 || item.front() == '-') {
      throw UsageError("--sizes: '" + item + "' is not a positive integer");
    }
    sizes.push_back(static_cast<std::size_t>(v));
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw UsageError("--sizes must be strictly ascending");
  }
  if (dim == 0) throw UsageError("--dim must be positive");
  if (queries == 0) throw UsageError("--queries must be positive");

  auto rows = bench_search(sizes, dim, queries);
  std::ofstream f(out_path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + out_path);
  f.precision(9);
  f << "size,mean_seconds,p95_seconds\n";
  std::vector<double> x, y;
  for (const auto& r : rows) {
    f << r.size << ',' << r.mean_seconds << ',' << r.p95_seconds << '\n';
    x.push_back(static_cast<double>(r.size));
    y.push_back(r.mean_seconds);
  }
  nlohmann::ordered_json j;
  j["out"] = out_path;
  j["rows"] = rows.size();
  if (rows.size() >= 2) {
    auto fit = stats::linear_fit(x, y);
    j["linear_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
  }
  out << j.dump(2) << '\n';
  return kOk;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool scoring) {
  cmd->add_option("--corpus", o.corpus, "Corpus JSONL file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--bank", o.bank, "ACUBank directory (created if missing)")->required();
  cmd->add_option("--config", o.config, "Run configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--layout", o.layout, "Corpus layout: clustered|chronological (default: from config, clustered)");
  cmd->add_option("--script", o.script, "Scripted backend responses JSONL (overrides config)")
      ->check(CLI::ExistingFile);
  if (scoring) {
    cmd->add_option("--evaluator", o.evaluator, "Novelty evaluator: cossim|nli|qa (default: from config, cossim)");
    cmd->add_option("--out", o.out, "Output directory for report.json and scores.jsonl")->required();
    cmd->add_option("--jobs", o.jobs, "Clusters processed concurrently (default: from config, 1)");
  }
}

int classify(const Error& e) { return is_backend_error(e.code()) ? kBackendError : kDataError; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Document-level novelty scoring over atomic content units", "novascore"};
  app.require_subcommand(1);

  RunOptions index_opts, score_opts;
  auto* index = app.add_subcommand("index", "Bank the source documents of a corpus");
  add_run_options(index, index_opts, false);
  auto* score = app.add_subcommand("score", "Score target documents and write report.json and scores.jsonl");
  add_run_options(score, score_opts, true);

  std::string corr_scores, corr_metrics = "pb,pearson,spearman,kendall", corr_out;
  auto* eval_corr = app.add_subcommand("eval-corr", "Recompute correlations from a scores file");
  eval_corr->add_option("--scores", corr_scores, "scores.jsonl from a score run")
      ->required()
      ->check(CLI::ExistingFile);
  eval_corr->add_option("--metrics", corr_metrics, "Comma-separated metrics")->capture_default_str();
  eval_corr->add_option("--out", corr_out, "Also write the result JSON here");

  std::string grid_scores, grid_alpha = "0:2:0.25", grid_beta = "0:0.8:0.1", grid_gamma = "0.5:1:0.05",
                           grid_objective = "spearman", grid_out;
  auto* grid = app.add_subcommand("grid-search", "Search (alpha, beta, gamma) by re-aggregating stored verdicts");
  grid->add_option("--scores-per-params", grid_scores, "scores.jsonl with per-ACU verdicts and gold labels")
      ->required()
      ->check(CLI::ExistingFile);
  grid->add_option("--alpha", grid_alpha, "alpha range lo:hi:step")->capture_default_str();
  grid->add_option("--beta", grid_beta, "beta range lo:hi:step")->capture_default_str();
  grid->add_option("--gamma", grid_gamma, "gamma range lo:hi:step")->capture_default_str();
  grid->add_option("--objective", grid_objective, "pb|pearson|spearman|kendall")->capture_default_str();
  grid->add_option("--out", grid_out, "Write the full surface as CSV here");

  std::string bench_sizes = "1000,10000,100000", bench_out = "bench.csv";
  std::size_t bench_dim = 256, bench_queries = 100;
  auto* bench = app.add_subcommand("bench-search", "Time top-k search against bank size");
  bench->add_option("--sizes", bench_sizes, "Comma-separated ascending bank sizes")->capture_default_str();
  bench->add_option("--dim", bench_dim, "Vector dimension")->capture_default_str();
  bench->add_option("--queries", bench_queries, "Timed queries per size")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV output path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*index) return cmd_index(index_opts, out);
    if (*score) return cmd_score(score_opts, out);
    if (*eval_corr) return cmd_eval_corr(corr_scores, corr_metrics, corr_out, out, err);
    if (*grid) {
      GridSpec spec;
      spec.alpha = usage_range("--alpha", grid_alpha);
      spec.beta = usage_range("--beta", grid_beta);
      spec.gamma = usage_range("--gamma", grid_gamma);
      try {
        spec.objective = parse_objective(grid_objective);
      } catch (const Error& e) {
        throw UsageError(std::string("--objective: ") + e.what());
      }
      return cmd_grid_search(grid_scores, spec, grid_out, out);
    }
    if (*bench) return cmd_bench(bench_sizes, bench_dim, bench_queries, bench_out, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return classify(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace novascore::cli
