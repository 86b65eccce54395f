#include "novascore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "novascore/error.hpp"

namespace novascore::stats {

namespace {

void check_pair(std::size_t nx, std::size_t ny) {
  if (nx != ny) {
    throw Error(ErrorCode::LengthMismatch,
                "inputs have lengths " + std::to_string(nx) + " and " + std::to_string(ny));
  }
  if (nx < 3) throw Error(ErrorCode::InvalidArgument, "correlation needs at least 3 samples");
}

// Lentz's method for the continued fraction of I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

CorrelationResult from_r(double r, std::size_t n, Method method) {
  r = std::clamp(r, -1.0, 1.0);
  CorrelationResult out{r, 0.0, n, method};
  if (std::abs(r) < 1.0) {
    const double df = static_cast<double>(n) - 2.0;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    out.p_value = student_t_two_sided_p(t, df);
  }
  return out;
}

// Sum over tie groups of f(group size).
template <typename F>
double tie_sum(std::span<const double> values, F f) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    total += f(static_cast<double>(j - i));
    i = j;
  }
  return total;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::pearson: return "pearson";
    case Method::point_biserial: return "point_biserial";
    case Method::spearman: return "spearman";
    case Method::kendall_b: return "kendall_b";
  }
  return "pearson";
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double normal_two_sided_p(double z) {
  return std::clamp(std::erfc(std::abs(z) / std::sqrt(2.0)), 0.0, 1.0);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size());
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantInput, "correlation input is constant");
  return from_r(sxy / std::sqrt(sxx * syy), x.size(), Method::pearson);
}

CorrelationResult point_biserial(std::span<const int> binary, std::span<const double> y) {
  check_pair(binary.size(), y.size());
  std::vector<double> coded;
  coded.reserve(binary.size());
  bool has0 = false, has1 = false;
  for (int b : binary) {
    if (b != 0 && b != 1) throw Error(ErrorCode::InvalidArgument, "point-biserial needs 0/1 input");
    has0 |= b == 0;
    has1 |= b == 1;
    coded.push_back(static_cast<double>(b));
  }
  if (!has0 || !has1) throw Error(ErrorCode::SingleClass, "binary variable has a single class");
  auto out = pearson(coded, y);
  out.method = Method::point_biserial;
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size());
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  auto out = pearson(rx, ry);
  out.method = Method::spearman;
  return out;
}

CorrelationResult kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x.size(), y.size());
  const std::size_t n = x.size();
  double concordant = 0.0, discordant = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) {
        concordant += 1.0;
      } else if (s < 0) {
        discordant += 1.0;
      }
    }
  }
  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1.0) / 2.0;
  const double n1 = tie_sum(x, [](double t) { return t * (t - 1.0) / 2.0; });
  const double n2 = tie_sum(y, [](double t) { return t * (t - 1.0) / 2.0; });
  if (n1 == n0 || n2 == n0) throw Error(ErrorCode::ConstantInput, "correlation input is constant");
  const double s = concordant - discordant;
  const double tau = std::clamp(s / std::sqrt((n0 - n1) * (n0 - n2)), -1.0, 1.0);

  // Variance of S under independence with ties in both rankings.
  const double m = nd * (nd - 1.0);
  const double v0 = m * (2.0 * nd + 5.0);
  const double vx = tie_sum(x, [](double t) { return t * (t - 1.0) * (2.0 * t + 5.0); });
  const double vy = tie_sum(y, [](double t) { return t * (t - 1.0) * (2.0 * t + 5.0); });
  const double x1 = tie_sum(x, [](double t) { return t * (t - 1.0); });
  const double y1 = tie_sum(y, [](double t) { return t * (t - 1.0); });
  const double x2 = tie_sum(x, [](double t) { return t * (t - 1.0) * (t - 2.0); });
  const double y2 = tie_sum(y, [](double t) { return t * (t - 1.0) * (t - 2.0); });
  const double var = (v0 - vx - vy) / 18.0 + (x1 * y1) / (2.0 * m) +
                     (x2 * y2) / (9.0 * m * (nd - 2.0));
  const double z = s / std::sqrt(var);
  return {tau, normal_two_sided_p(z), n, Method::kendall_b};
}

std::string_view to_string(Strength s) {
  switch (s) {
    case Strength::negligible: return "negligible";
    case Strength::weak: return "weak";
    case Strength::moderate: return "moderate";
    case Strength::strong: return "strong";
    case Strength::very_strong: return "very_strong";
  }
  return "negligible";
}

Strength classify_strength(double statistic, Method method) {
  std::array<double, 4> cut{0.10, 0.40, 0.70, 0.90};
  if (method == Method::spearman) cut = {0.10, 0.38, 0.68, 0.89};
  if (method == Method::kendall_b) cut = {0.06, 0.26, 0.49, 0.71};
  const double a = std::abs(statistic);
  if (a >= cut[3]) return Strength::very_strong;
  if (a >= cut[2]) return Strength::strong;
  if (a >= cut[1]) return Strength::moderate;
  if (a >= cut[0]) return Strength::weak;
  return Strength::negligible;
}

ClassificationReport classification_metrics(std::span<const int> pred, std::span<const int> gold) {
  if (pred.size() != gold.size()) {
    throw Error(ErrorCode::LengthMismatch, "pred and gold differ in length");
  }
  if (pred.empty()) throw Error(ErrorCode::InvalidArgument, "classification metrics need samples");
  std::array<std::array<std::size_t, 2>, 2> confusion{};  // [gold][pred]
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred[i] != 0 && pred[i] != 1) || (gold[i] != 0 && gold[i] != 1)) {
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
    ++confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(pred[i])];
  }
  ClassificationReport report;
  const auto total = static_cast<double>(pred.size());
  report.accuracy = static_cast<double>(confusion[0][0] + confusion[1][1]) / total;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& m = report.per_class[c];
    const std::size_t tp = confusion[c][c];
    const std::size_t predicted = confusion[0][c] + confusion[1][c];
    m.support = confusion[c][0] + confusion[c][1];
    m.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
    m.recall = m.support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(m.support);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    report.macro_f1 += m.f1 / 2.0;
    report.weighted_f1 += m.f1 * static_cast<double>(m.support) / total;
  }
  return report;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "linear fit needs at least 2 points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::ConstantInput, "linear fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace novascore::stats
