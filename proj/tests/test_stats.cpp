#include <doctest.h>

#include <cmath>
#include <random>

#include "novascore/error.hpp"
#include "novascore/stats.hpp"
#include "oracle.hpp"

using namespace novascore;
using namespace novascore::stats;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

using V = std::vector<double>;

}  // namespace

TEST_SUITE("stats") {
  TEST_CASE("hand-derived values") {
    CHECK(pearson(V{1, 2, 3}, V{1, 2, 4}).statistic == doctest::Approx(9.0 / std::sqrt(84.0)).epsilon(1e-12));
    std::vector<int> b{0, 0, 1, 1};
    CHECK(point_biserial(b, V{1, 2, 3, 4}).statistic == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(spearman(V{1, 2, 3}, V{1, 3, 2}).statistic == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(kendall(V{1, 2, 2, 3}, V{1, 2, 3, 4}).statistic == doctest::Approx(5.0 / std::sqrt(30.0)).epsilon(1e-12));
    CHECK(average_ranks(V{1, 1, 2}) == V{1.5, 1.5, 3});
  }

  TEST_CASE("p-values agree with frozen scipy values") {
    // scipy.stats 1.x: pearsonr, spearmanr, kendalltau(method="asymptotic").
    CHECK(pearson(V{1, 2, 3}, V{1, 2, 4}).p_value == doctest::Approx(0.12103771832367739).epsilon(1e-9));
    CHECK(kendall(V{1, 2, 2, 3}, V{1, 2, 3, 4}).p_value == doctest::Approx(0.07095149242730563).epsilon(1e-9));
    V x{1, 1, 2, 2, 3, 3, 4, 5, 5, 6};
    V y{2, 1, 2, 3, 3, 3, 5, 4, 6, 6};
    auto k = kendall(x, y);
    CHECK(k.statistic == doctest::Approx(0.8642633970683908).epsilon(1e-12));
    CHECK(k.p_value == doctest::Approx(0.001142796855306664).epsilon(1e-9));
    auto s = spearman(x, y);
    CHECK(s.statistic == doctest::Approx(0.9406433721202788).epsilon(1e-12));
    CHECK(s.p_value == doctest::Approx(5.053357805282326e-05).epsilon(1e-9));
    auto p = pearson(x, y);
    CHECK(p.statistic == doctest::Approx(0.9244055210809685).epsilon(1e-12));
    CHECK(p.p_value == doctest::Approx(0.00013031278577042558).epsilon(1e-9));
  }

  TEST_CASE("perfect correlations") {
    V x{1, 2, 3, 4};
    auto r = pearson(x, x);
    CHECK(r.statistic == 1.0);
    CHECK(r.p_value == 0.0);
    CHECK(pearson(x, V{-1, -2, -3, -4}).statistic == -1.0);
    CHECK(kendall(x, V{4, 3, 2, 1}).statistic == -1.0);
    CHECK(kendall(x, x).statistic == 1.0);
    CHECK(spearman(x, V{1, 8, 27, 64}).statistic == doctest::Approx(1.0));
  }

  TEST_CASE("input errors") {
    CHECK(code_of([] { pearson(V{1, 1, 1}, V{1, 2, 3}); }) == ErrorCode::ConstantInput);
    CHECK(code_of([] { pearson(V{1, 2, 3}, V{1, 2}); }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] { pearson(V{1, 2}, V{1, 2}); }) == ErrorCode::InvalidArgument);
    std::vector<int> ones{1, 1, 1};
    CHECK(code_of([&] { point_biserial(ones, V{1, 2, 3}); }) == ErrorCode::SingleClass);
  }

  TEST_CASE("properties: symmetry, affine invariance, point-biserial identity") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 20; ++rep) {
      V x(30), y(30);
      std::vector<int> b(30);
      V bd(30);
      for (int i = 0; i < 30; ++i) {
        x[i] = g(rng);
        y[i] = std::round(g(rng) * 2) / 2;
        b[i] = i % 3 == 0 ? 1 : 0;
        bd[i] = b[i];
      }
      CHECK(pearson(x, y).statistic == doctest::Approx(pearson(y, x).statistic).epsilon(1e-12));
      CHECK(kendall(x, y).statistic == doctest::Approx(kendall(y, x).statistic).epsilon(1e-12));
      CHECK(spearman(x, y).statistic == doctest::Approx(spearman(y, x).statistic).epsilon(1e-12));
      V ax(30), nx(30);
      for (int i = 0; i < 30; ++i) {
        ax[i] = 3.5 * x[i] + 2;
        nx[i] = -2 * x[i] + 1;
      }
      CHECK(std::abs(pearson(ax, y).statistic - pearson(x, y).statistic) < 1e-9);
      CHECK(std::abs(pearson(nx, y).statistic + pearson(x, y).statistic) < 1e-9);
      auto pb = point_biserial(b, y);
      auto pr = pearson(bd, y);
      CHECK(pb.statistic == pr.statistic);
      CHECK(pb.p_value == pr.p_value);
      auto rx = average_ranks(x);
      auto ry = average_ranks(y);
      CHECK(spearman(x, y).statistic == pearson(rx, ry).statistic);
    }
  }

  TEST_CASE("oracle equivalence on seeded pairs with ties") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 100; ++rep) {
      V x(50), y(50);
      for (int i = 0; i < 50; ++i) {
        x[i] = g(rng);
        y[i] = 0.5 * x[i] + g(rng);
        if (rep % 2 == 0) {
          x[i] = std::round(x[i] * 2) / 2;
          y[i] = std::round(y[i] * 2) / 2;
        }
      }
      auto check = [](const CorrelationResult& got, const oracle::Result& want) {
        CHECK(std::abs(got.statistic - want.statistic) < 1e-9);
        CHECK(std::abs(got.p_value - want.p_value) < 1e-6);
      };
      check(pearson(x, y), oracle::pearson(x, y));
      check(spearman(x, y), oracle::spearman(x, y));
      check(kendall(x, y), oracle::kendall_b(x, y));
    }
  }

  TEST_CASE("special functions") {
    CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
    // I_x(1, 1) = x; I_x(2, 1) = x^2.
    CHECK(regularized_incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2, 1, 0.3) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
    boost::math::students_t d(7.0);
    CHECK(student_t_two_sided_p(2.3, 7) ==
          doctest::Approx(2 * boost::math::cdf(boost::math::complement(d, 2.3))).epsilon(1e-10));
  }

  TEST_CASE("strength bands") {
    CHECK(classify_strength(0.70, Method::pearson) == Strength::strong);
    CHECK(classify_strength(0.69999, Method::pearson) == Strength::moderate);
    CHECK(classify_strength(0.626, Method::point_biserial) == Strength::moderate);
    CHECK(classify_strength(0.05, Method::kendall_b) == Strength::negligible);
    CHECK(classify_strength(0.06, Method::kendall_b) == Strength::weak);
    CHECK(classify_strength(-0.95, Method::spearman) == Strength::very_strong);
    CHECK(classify_strength(0.38, Method::spearman) == Strength::moderate);
    CHECK(classify_strength(0.89, Method::spearman) == Strength::very_strong);
  }

  TEST_CASE("classification metrics") {
    std::vector<int> gold{1, 0, 0};
    std::vector<int> pred{1, 1, 0};
    auto r = classification_metrics(pred, gold);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0));
    std::vector<int> ones{1, 1, 1};
    auto all = classification_metrics(ones, ones);
    CHECK(all.per_class[0].support == 0);
    CHECK(all.per_class[0].f1 == 0.0);
    CHECK(all.weighted_f1 == doctest::Approx(1.0));
    CHECK(all.accuracy == 1.0);
    std::vector<int> short_gold{1, 0};
    CHECK(code_of([&] { classification_metrics(ones, short_gold); }) == ErrorCode::LengthMismatch);
  }

  TEST_CASE("linear fit") {
    V x{1, 2, 3, 4};
    V y{3, 5, 7, 9};
    auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
  }
}
