// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golden.hpp"
#include "novascore/acubank.hpp"
#include "novascore/cli.hpp"
#include "novascore/error.hpp"
#include "novascore/novelty.hpp"
#include "novascore/scoring.hpp"
#include "novascore/stats.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace novascore;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// Runtime limits in seconds, per criterion.
constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 5.0;
constexpr double kLimit3 = 30.0;
constexpr double kLimit4 = 10.0;
constexpr double kLimit5 = 30.0;
constexpr double kLimit7 = 300.0;
constexpr double kLimit8 = 60.0;

// Tolerances.
constexpr double kExact = 1e-12;
constexpr double kStatTol = 1e-9;
constexpr double kPValueTol = 1e-6;
constexpr double kMinRSquared = 0.9;

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Outcome weight_curve() {
  const auto adj = WeightParams::salience_adjusted();
  const double want[] = {0.575, 0.7, 0.825};
  const double at[] = {0.0, 0.5, 1.0};
  for (int i = 0; i < 3; ++i) {
    double got = non_salient_weight(adj, at[i]);
    if (std::abs(got - want[i]) > kExact) {
      return {false, "w_ns(" + std::to_string(at[i]) + ") = " + std::to_string(got)};
    }
  }
  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    double p = i / 1000.0;
    double w = non_salient_weight(adj, p);
    if (w < prev) return {false, "decreasing at p_s = " + std::to_string(p)};
    prev = w;
    if (non_salient_weight(WeightParams::unadjusted(), p) != 1.0) return {false, "unadjusted weight is not 1"};
  }
  return {true, "0.575 / 0.7 / 0.825, monotone on 1001 points, unadjusted constant 1"};
}

Outcome aggregation_identity() {
  std::mt19937_64 rng(1001);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + draw(rng, 40);
    std::vector<AcuOutcome> acus;
    std::size_t novel = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool nv = draw(rng, 2) == 1;
      novel += nv ? 1 : 0;
      acus.push_back({"d#" + std::to_string(i), nv, draw(rng, 2) == 1});
    }
    double ratio = static_cast<double>(novel) / static_cast<double>(n);
    double plain = aggregate("d", acus, WeightParams::unadjusted()).novascore;
    if (std::abs(plain - ratio) > kExact) return {false, "fixture " + std::to_string(rep) + ": not the novelty ratio"};

    WeightParams p{2.0 * uniform01(rng), 0.8 * uniform01(rng), 0.5 + 0.5 * uniform01(rng)};
    double s = aggregate("d", acus, p).novascore;
    if (!(s >= 0.0 && s <= 1.0)) return {false, "fixture " + std::to_string(rep) + ": score outside [0,1]"};
    auto shuffled = acus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::abs(aggregate("d", shuffled, p).novascore - s) > kExact) {
      return {false, "fixture " + std::to_string(rep) + ": not permutation invariant"};
    }
  }
  return {true, "1000 fixtures"};
}

Outcome retrieval_oracle() {
  std::mt19937_64 rng(303);
  const std::size_t dim = 64;
  const SearchOptions opts{5, 0.6, std::nullopt};
  std::size_t total_hits = 0, tie_cases = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t size = 1 + draw(rng, 500);
    // A few centroids with noisy satellites and some exact repeats, so
    // queries land above the floor and ties occur.
    std::vector<EmbeddingVector> centroids;
    for (int c = 0; c < 4; ++c) centroids.push_back(testing::random_unit(rng, dim));
    std::vector<EmbeddingVector> vectors;
    AcuBank bank;
    std::vector<NewAcuRecord> batch;
    for (std::size_t i = 0; i < size; ++i) {
      EmbeddingVector v = [&] {
        if (i > 0 && draw(rng, 10) == 0) return vectors[draw(rng, vectors.size())];
        const auto& c = centroids[draw(rng, centroids.size())];
        auto noise = testing::random_unit(rng, dim);
        const double w = 0.3 + 0.9 * uniform01(rng);
        std::vector<double> raw(dim);
        for (std::size_t d = 0; d < dim; ++d) raw[d] = c.values()[d] + w * noise.values()[d];
        return EmbeddingVector::normalized(std::move(raw));
      }();
      vectors.push_back(v);
      batch.push_back({"r" + std::to_string(i), "doc" + std::to_string(i / 3), "t", v});
    }
    bank.insert("db", std::move(batch));

    for (int q = 0; q < 5; ++q) {
      const EmbeddingVector query =
          q == 0 ? vectors[draw(rng, vectors.size())] : centroids[draw(rng, centroids.size())];
      // Brute force: score every row, keep those at or above the floor,
      // stable sort by similarity so insertion order breaks ties.
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) s += query.values()[d] * vectors[i].values()[d];
        s = std::clamp(s, -1.0, 1.0);
        if (s >= opts.min_sim) all.emplace_back(s, i);
      }
      std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (all.size() > opts.k) all.resize(opts.k);
      for (std::size_t i = 1; i < all.size(); ++i) tie_cases += all[i].first == all[i - 1].first ? 1 : 0;

      auto hits = bank.search_top_k("db", query, opts);
      if (hits.size() != all.size()) {
        return {false, "bank " + std::to_string(rep) + ": " + std::to_string(hits.size()) + " hits, oracle " +
                           std::to_string(all.size())};
      }
      for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i].record.acu_id != "r" + std::to_string(all[i].second) ||
            std::abs(hits[i].similarity - all[i].first) > kExact) {
          return {false, "bank " + std::to_string(rep) + " query " + std::to_string(q) + " rank " + std::to_string(i)};
        }
      }
      total_hits += hits.size();
    }
  }
  return {true, "200 banks x 5 queries, " + std::to_string(total_hits) + " hits, " + std::to_string(tie_cases) +
                    " tied neighbours"};
}

Outcome statistics_oracle() {
  using V = std::vector<double>;
  auto close = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  if (!close(stats::pearson(V{1, 2, 3}, V{1, 2, 4}).statistic, 9.0 / std::sqrt(84.0), kStatTol)) {
    return {false, "pearson hand value"};
  }
  std::vector<int> b4{0, 0, 1, 1};
  if (!close(stats::point_biserial(b4, V{1, 2, 3, 4}).statistic, 2.0 / std::sqrt(5.0), kStatTol)) {
    return {false, "point-biserial hand value"};
  }
  if (!close(stats::kendall(V{1, 2, 2, 3}, V{1, 2, 3, 4}).statistic, 5.0 / std::sqrt(30.0), kStatTol)) {
    return {false, "kendall hand value"};
  }
  std::mt19937_64 rng(4004);
  std::normal_distribution<double> g;
  double worst_stat = 0.0, worst_p = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    V x(50), y(50), bd(50);
    std::vector<int> bin(50);
    for (int i = 0; i < 50; ++i) {
      x[i] = g(rng);
      y[i] = 0.4 * x[i] + g(rng);
      if (rep % 2 == 1) {
        x[i] = std::round(2 * x[i]) / 2;
        y[i] = std::round(2 * y[i]) / 2;
      }
      bin[i] = i % 2;
      bd[i] = bin[i];
    }
    const std::pair<stats::CorrelationResult, oracle::Result> pairs[] = {
        {stats::pearson(x, y), oracle::pearson(x, y)},
        {stats::point_biserial(bin, y), oracle::pearson(bd, y)},
        {stats::spearman(x, y), oracle::spearman(x, y)},
        {stats::kendall(x, y), oracle::kendall_b(x, y)},
    };
    for (const auto& [got, want] : pairs) {
      worst_stat = std::max(worst_stat, std::abs(got.statistic - want.statistic));
      worst_p = std::max(worst_p, std::abs(got.p_value - want.p_value));
    }
    auto pb = stats::point_biserial(bin, y);
    auto pr = stats::pearson(bd, y);
    if (pb.statistic != pr.statistic || pb.p_value != pr.p_value) return {false, "point-biserial != pearson bitwise"};
  }
  std::ostringstream d;
  d << "max |stat diff| " << worst_stat << ", max |p diff| " << worst_p;
  if (worst_stat > kStatTol || worst_p > kPValueTol) return {false, d.str()};
  return {true, d.str()};
}

Outcome end_to_end() {
  const auto fx = testing::fixture_dir();
  std::string first;
  for (int run = 0; run < 2; ++run) {
    testing::TempDir dir("accept5");
    const std::string bank = (dir / "bank").string();
    const std::string out = (dir / "out").string();
    const std::string corpus = (fx / "documents.jsonl").string();
    const std::string config = (fx / "config.json").string();
    const char* argv[] = {"novascore", "score",      "--corpus", corpus.c_str(), "--bank",
                          bank.c_str(), "--config", config.c_str(), "--out",  out.c_str()};
    std::ostringstream o, e;
    int code = cli::run(10, argv, o, e);
    if (code != 0) return {false, "score exited " + std::to_string(code) + ": " + e.str()};
    auto diff = testing::compare_to_golden(dir / "out" / "scores.jsonl", fx / "golden_scores.json");
    if (!diff.empty()) return {false, diff};
    auto bytes = testing::slurp(dir / "out" / "scores.jsonl");
    if (run == 0) {
      first = bytes;
    } else if (bytes != first) {
      return {false, "second run differs byte-wise"};
    }
  }
  if (first.find("\"doc_id\":\"h-t1\"") == std::string::npos || first.find("\"novascore\":0.425") == std::string::npos ||
      first.find("\"novascore\":0.0") == std::string::npos) {
    return {false, "worked example or duplicate score missing"};
  }
  return {true, "golden match (incl. 0.425 and 0.0), two runs byte-identical"};
}

Outcome evaluator_rules() {
  struct Row {
    std::string name;
    std::function<bool()> check;
  };
  auto target = [](const std::string& text) {
    Acu a;
    a.acu_id = "t#0";
    a.doc_id = "t";
    a.text = text;
    return a;
  };
  auto hit = [](const std::string& text, double sim) {
    return RetrievalHit{AcuRecord{"h#0", "h", "c", text, EmbeddingVector::from_unit({1.0, 0.0}), 0}, sim};
  };
  const EvaluatorConfig cfg;
  const double y85 = std::sqrt(1.0 - 0.85 * 0.85);
  testing::TableEmbedder table({{"target", {1.0, 0.0}}, {"answer at threshold", {0.85, y85}}, {"answer below", {0.84, std::sqrt(1.0 - 0.84 * 0.84)}}});

  auto nli_with = [&](const std::string& label) {
    ScriptedBackend b;
    b.enqueue(TemplateId::nli_batch, R"({"nli_results":[{"id":1,"nli":")" + label + R"("}]})");
    std::vector<Acu> t{target("target")};
    std::vector<std::vector<RetrievalHit>> h{{hit("history", 0.9)}};
    return evaluate_nli(t, h, b, cfg).at(0).is_novel;
  };
  auto qa_with = [&](const std::string& answer) {
    ScriptedBackend b;
    b.enqueue(TemplateId::qa_question_gen, R"({"questions_list":[["a?","b?","c?"]]})");
    b.enqueue(TemplateId::qa_answering, R"({"answers":[")" + answer + R"("]})");
    std::vector<Acu> t{target("target")};
    std::vector<std::vector<RetrievalHit>> h{{hit("history", 0.9)}};
    return evaluate_qa(t, h, b, table, cfg).at(0);
  };

  const std::vector<Row> rows{
      {"cossim empty hits novel", [&] { return evaluate_cossim(target("target"), {}, cfg).is_novel; }},
      {"nli empty hits novel, no tokens",
       [&] {
         ScriptedBackend b;
         std::vector<Acu> t{target("target")};
         std::vector<std::vector<RetrievalHit>> h{{}};
         return evaluate_nli(t, h, b, cfg).at(0).is_novel && b.ledger().grand_total().total() == 0 &&
                b.ledger().grand_total().calls == 0;
       }},
      {"qa empty hits novel, no tokens",
       [&] {
         ScriptedBackend b;
         std::vector<Acu> t{target("target")};
         std::vector<std::vector<RetrievalHit>> h{{}};
         return evaluate_qa(t, h, b, table, cfg).at(0).is_novel && b.ledger().grand_total().calls == 0;
       }},
      {"cossim hit at 0.6 non-novel",
       [&] {
         std::vector<RetrievalHit> h{hit("x", 0.6)};
         return !evaluate_cossim(target("target"), h, cfg).is_novel;
       }},
      {"nli entailment non-novel", [&] { return !nli_with("entailment"); }},
      {"nli neutral novel", [&] { return nli_with("neutral"); }},
      {"nli contradiction novel", [&] { return nli_with("contradiction"); }},
      {"qa similarity exactly 0.85 non-novel",
       [&] {
         auto v = qa_with("answer at threshold");
         return v.evidence.answer_similarity == 0.85 && !v.is_novel;
       }},
      {"qa similarity 0.84 novel", [&] { return qa_with("answer below").is_novel; }},
  };
  std::size_t passed = 0;
  std::string failed;
  for (const auto& r : rows) {
    bool ok = false;
    try {
      ok = r.check();
    } catch (const std::exception& e) {
      failed += r.name + " threw " + e.what() + "; ";
      continue;
    }
    if (ok) {
      ++passed;
    } else {
      failed += r.name + "; ";
    }
  }
  if (passed != rows.size()) return {false, std::to_string(passed) + "/" + std::to_string(rows.size()) + " rows: " + failed};
  return {true, std::to_string(rows.size()) + "/" + std::to_string(rows.size()) + " rows"};
}

Outcome scaling() {
  auto rows = bench_search({1000, 10000, 100000}, 256, 100);
  std::vector<double> x, y;
  std::ostringstream d;
  for (const auto& r : rows) {
    x.push_back(static_cast<double>(r.size));
    y.push_back(r.mean_seconds);
    d << r.size << ": " << r.mean_seconds * 1e3 << " ms; ";
  }
  auto fit = stats::linear_fit(x, y);
  d << "R^2 = " << fit.r_squared;
  return {fit.r_squared >= kMinRSquared, d.str()};
}

Outcome grid_recovery() {
  // Planted fixture: gold is the score under (1, 0.5, 0.7); objective pearson.
  std::mt19937_64 rng(808);
  std::vector<std::vector<AcuOutcome>> docs;
  for (int d = 0; d < 60; ++d) {
    const std::size_t n = 2 + draw(rng, 14);
    std::vector<AcuOutcome> acus;
    for (std::size_t i = 0; i < n; ++i) acus.push_back({"a", draw(rng, 3) != 0, draw(rng, 2) == 0});
    docs.push_back(std::move(acus));
  }
  const auto planted = WeightParams::salience_adjusted();
  std::vector<double> gold;
  for (const auto& d : docs) gold.push_back(aggregate("d", d, planted).novascore);
  ScoreFn fn = [&](const WeightParams& p) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < docs.size(); ++i) out.emplace_back(aggregate("d", docs[i], p).novascore, gold[i]);
    return out;
  };
  GridSpec spec;
  spec.objective = Objective::pearson;
  auto r = grid_search(fn, spec);
  std::ostringstream d;
  d << "planted -> (" << r.best.alpha << ", " << r.best.beta << ", " << r.best.gamma << ") r=" << r.best_statistic;
  if (!(r.best == planted)) return {false, d.str()};

  // Identity fixture: gold is the plain novelty ratio.
  std::vector<double> ratio;
  for (const auto& doc : docs) ratio.push_back(aggregate("d", doc, WeightParams::unadjusted()).novascore);
  ScoreFn id = [&](const WeightParams& p) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < docs.size(); ++i) out.emplace_back(aggregate("d", docs[i], p).novascore, ratio[i]);
    return out;
  };
  GridSpec id_spec;
  id_spec.objective = Objective::pearson;
  auto ri = grid_search(id, id_spec);
  d << "; identity -> (" << ri.best.alpha << ", " << ri.best.beta << ", " << ri.best.gamma << ") r=" << ri.best_statistic;
  bool ok = ri.best.alpha == 0.0 && ri.best.gamma == 1.0 && std::abs(ri.best_statistic - 1.0) <= kExact;
  return {ok, d.str()};
}

Outcome strength() {
  using stats::Method;
  using stats::Strength;
  bool ok = stats::classify_strength(0.70, Method::pearson) == Strength::strong &&
            stats::classify_strength(0.05, Method::kendall_b) == Strength::negligible &&
            stats::classify_strength(0.626, Method::point_biserial) == Strength::moderate &&
            stats::classify_strength(0.626, Method::pearson) == Strength::moderate;
  return {ok, "(0.70, pearson) strong; (0.05, kendall) negligible; 0.626 moderate"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "weight-curve exactness", kLimit1, weight_curve},
      {2, "aggregation identity", kLimit2, aggregation_identity},
      {3, "retrieval oracle", kLimit3, retrieval_oracle},
      {4, "statistics oracle", kLimit4, statistics_oracle},
      {5, "end-to-end determinism", kLimit5, end_to_end},
      {6, "evaluator decision rules", 0.0, evaluator_rules},
      {7, "search scaling", kLimit7, scaling},
      {8, "grid-search recovery", kLimit8, grid_recovery},
      {9, "strength classification", 0.0, strength},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0.0 && secs > c.limit) {
      o.pass = false;
      o.detail += " [over time limit " + std::to_string(c.limit) + " s]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << secs << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
