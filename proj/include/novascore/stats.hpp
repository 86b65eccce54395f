#pragma once

// Correlation statistics with two-sided p-values, strength bands and binary
// classification metrics.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace novascore::stats {

enum class Method { pearson, point_biserial, spearman, kendall_b };

std::string_view to_string(Method m);

struct CorrelationResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  Method method = Method::pearson;
};

// Product-moment r; p from t = r*sqrt((n-2)/(1-r^2)) on n-2 degrees of
// freedom, and p = 0 when |r| = 1. Needs n >= 3 and non-constant inputs.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Pearson on 0/1-coded input; both classes must occur.
CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> y);

// Pearson on average ranks, same p-value transform.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

// Tau-b with tie corrections; p from the normal approximation using the
// tie-corrected variance of the concordance score.
CorrelationResult kendall(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of their rank block.
std::vector<double> average_ranks(std::span<const double> values);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
// P(|T| >= |t|) for Student-t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);
// P(|Z| >= |z|) for a standard normal.
double normal_two_sided_p(double z);

enum class Strength { negligible, weak, moderate, strong, very_strong };

std::string_view to_string(Strength s);

// Bands on |statistic|, lower bound inclusive:
//   pearson / point-biserial  0.10 0.40 0.70 0.90
//   spearman                  0.10 0.38 0.68 0.89
//   kendall                   0.06 0.26 0.49 0.71
Strength classify_strength(double statistic, Method method);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::array<ClassMetrics, 2> per_class{};  // index = class label 0 / 1
};

// Zero-support classes report P = R = F1 = 0.
ClassificationReport classification_metrics(std::span<const int> pred, std::span<const int> gold);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace novascore::stats
