#include <doctest.h>

#include <sstream>

#include "novascore/error.hpp"
#include "novascore/scoring.hpp"

using namespace novascore;

namespace {

std::vector<AcuOutcome> outcomes(std::vector<int> novel, std::vector<int> salient) {
  std::vector<AcuOutcome> out;
  for (std::size_t i = 0; i < novel.size(); ++i) {
    out.push_back({"d#" + std::to_string(i), novel[i] != 0, salient[i] != 0});
  }
  return out;
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("non-salient weight curve") {
    auto adj = WeightParams::salience_adjusted();
    CHECK(non_salient_weight(adj, 0.0) == doctest::Approx(0.575).epsilon(1e-14));
    CHECK(non_salient_weight(adj, 0.5) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(non_salient_weight(adj, 1.0) == doctest::Approx(0.825).epsilon(1e-14));
    CHECK(non_salient_weight(WeightParams::unadjusted(), 0.3) == 1.0);
    CHECK(non_salient_weight({2.0, 0.8, 0.5}, 0.0) == 0.0);
    CHECK(non_salient_weight({2.0, 0.0, 0.9}, 1.0) == 1.0);
  }

  TEST_CASE("worked example and duplicates") {
    auto s = aggregate("d", outcomes({1, 1, 0, 0}, {1, 0, 1, 0}), WeightParams::salience_adjusted());
    CHECK(s.novascore == doctest::Approx(0.425).epsilon(1e-14));
    CHECK(s.salience_ratio == 0.5);
    CHECK(s.w_ns_used == doctest::Approx(0.7));
    CHECK(recompute_novascore(s) == s.novascore);
    CHECK(aggregate("d", outcomes({0, 0, 0}, {1, 0, 0}), WeightParams::salience_adjusted()).novascore == 0.0);
    CHECK(aggregate("d", outcomes({1, 1}, {0, 1}), WeightParams::unadjusted()).novascore == 1.0);
    try {
      aggregate("d", {}, WeightParams::unadjusted());
      FAIL("expected EmptyDocument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyDocument);
    }
  }

  TEST_CASE("novascore joins verdicts with salience flags") {
    std::vector<NoveltyVerdict> v(2);
    v[0].acu_id = "a";
    v[0].is_novel = true;
    v[1].acu_id = "b";
    v[1].is_novel = false;
    bool sal[] = {false, true};
    auto s = novascore::novascore("d", v, sal, WeightParams::salience_adjusted());
    CHECK(s.per_acu[0].weight == doctest::Approx(0.7));
    CHECK(s.novascore == doctest::Approx(0.35));
    bool one[] = {true};
    CHECK_THROWS_AS(novascore::novascore("d", v, one, WeightParams::unadjusted()), Error);
  }

  TEST_CASE("range lattice") {
    GridSpec spec;
    CHECK(spec.alpha.values().size() == 9);
    CHECK(spec.beta.values().size() == 9);
    CHECK(spec.gamma.values().size() == 11);
    CHECK(spec.beta.values()[3] == 0.3);
    CHECK(spec.gamma.values()[4] == 0.7);
    CHECK(spec.gamma.values().back() == 1.0);
    auto r = parse_range("0.5:1:0.05");
    CHECK(r.lo == 0.5);
    CHECK(r.step == 0.05);
    for (const char* bad : {"1:0:0.1", "0:1", "0:1:0", "a:b:c", "0:1:0.1:2"}) {
      CHECK_THROWS_AS(parse_range(bad), Error);
    }
    CHECK(parse_objective("pb") == Objective::point_biserial);
    CHECK_THROWS_AS(parse_objective("auc"), Error);
  }

  TEST_CASE("grid search tie order prefers mild parameters") {
    // Parameter-independent scores: every lattice point ties.
    ScoreFn flat = [](const WeightParams&) {
      return std::vector<std::pair<double, double>>{{0.1, 0.0}, {0.5, 0.5}, {0.9, 1.0}};
    };
    auto r = grid_search(flat, {});
    CHECK(r.surface.size() == 891);
    CHECK(r.best == WeightParams{0.0, 0.5, 1.0});
    CHECK(r.best_statistic == doctest::Approx(1.0));
  }

  TEST_CASE("grid search preconditions and undefined points") {
    ScoreFn few = [](const WeightParams&) { return std::vector<std::pair<double, double>>{{0.1, 0}, {0.2, 1}}; };
    CHECK_THROWS_AS(grid_search(few, {}), Error);
    ScoreFn same = [](const WeightParams&) {
      return std::vector<std::pair<double, double>>{{0.1, 1}, {0.2, 1}, {0.3, 1}};
    };
    try {
      grid_search(same, {});
      FAIL("expected DegenerateLabels");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateLabels);
    }
    // Constant scores wherever alpha > 0: those points are NaN, not errors.
    ScoreFn partial = [](const WeightParams& p) {
      double s = p.alpha > 0 ? 0.5 : 0.0;
      return std::vector<std::pair<double, double>>{{s, 0}, {0.5, 1}, {0.5, 0.5}};
    };
    GridSpec spec;
    spec.alpha = {0.0, 1.0, 0.5};
    spec.beta = {0.5, 0.5, 0.1};
    spec.gamma = {1.0, 1.0, 0.1};
    spec.objective = Objective::pearson;
    auto r = grid_search(partial, spec);
    CHECK(r.best.alpha == 0.0);
    std::ostringstream csv;
    write_surface_csv(csv, r);
    CHECK(csv.str().rfind("alpha,beta,gamma,statistic\n", 0) == 0);
    CHECK(csv.str().find("nan") != std::string::npos);
  }
}
