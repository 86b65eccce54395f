#pragma once

// Textbook reference formulas used as test oracles. Deliberately naive:
// O(n^2) ranks and pair counts, long double sums, Boost.Math tail areas.

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace oracle {

struct Result {
  double statistic;
  double p_value;
};

inline double t_two_sided(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

inline Result pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  return {r, t_two_sided(r, n)};
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      if (w == v[i]) equal += 1;
    }
    out[i] = less + (equal + 1.0) / 2.0;
  }
  return out;
}

inline Result spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

inline Result kendall_b(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  long double concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      if (s > 0) concordant += 1;
      if (s < 0) discordant += 1;
    }
  }
  auto tie_sums = [](const std::vector<double>& v) {
    std::map<double, long double> groups;
    for (double w : v) groups[w] += 1;
    long double pairs = 0, a = 0, b = 0, c = 0;
    for (auto [value, t] : groups) {
      (void)value;
      pairs += t * (t - 1) / 2;
      a += t * (t - 1);
      b += t * (t - 1) * (t - 2);
      c += t * (t - 1) * (2 * t + 5);
    }
    return std::vector<long double>{pairs, a, b, c};
  };
  auto tx = tie_sums(x);
  auto ty = tie_sums(y);
  const long double nn = n;
  const long double n0 = nn * (nn - 1) / 2;
  const double tau =
      static_cast<double>((concordant - discordant) / std::sqrt((n0 - tx[0]) * (n0 - ty[0])));
  const long double var = (nn * (nn - 1) * (2 * nn + 5) - tx[3] - ty[3]) / 18 +
                          tx[1] * ty[1] / (2 * nn * (nn - 1)) +
                          tx[2] * ty[2] / (9 * nn * (nn - 1) * (nn - 2));
  const double z = static_cast<double>((concordant - discordant) / std::sqrt(var));
  boost::math::normal unit;
  return {tau, 2.0 * boost::math::cdf(boost::math::complement(unit, std::abs(z)))};
}

}  // namespace oracle
