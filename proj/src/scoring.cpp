#include "novascore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "novascore/error.hpp"
#include "novascore/stats.hpp"

namespace novascore {

double non_salient_weight(const WeightParams& params, double salience_ratio) {
  const double d = salience_ratio - params.beta;
  const double raw = params.alpha * d * d * d + params.gamma;
  return std::clamp(std::min(WeightParams::w_s, raw), 0.0, 1.0);
}

DocumentScore aggregate(std::string doc_id, std::span<const AcuOutcome> outcomes,
                        const WeightParams& params) {
  if (outcomes.empty()) {
    throw Error(ErrorCode::EmptyDocument, "document '" + doc_id + "' has no ACUs");
  }
  DocumentScore score;
  score.doc_id = std::move(doc_id);
  score.n_acus = outcomes.size();
  std::size_t n_salient = 0;
  for (const auto& o : outcomes) n_salient += o.salient ? 1 : 0;
  const auto n = static_cast<double>(outcomes.size());
  score.salience_ratio = static_cast<double>(n_salient) / n;
  score.w_ns_used = non_salient_weight(params, score.salience_ratio);
  double total = 0.0;
  for (const auto& o : outcomes) {
    const double weight = o.salient ? WeightParams::w_s : score.w_ns_used;
    score.per_acu.push_back({o.acu_id, o.is_novel, o.salient, weight});
    if (o.is_novel) total += weight;
  }
  score.novascore = total / n;
  return score;
}

DocumentScore novascore(std::string doc_id, std::span<const NoveltyVerdict> verdicts,
                        std::span<const bool> saliences, const WeightParams& params) {
  if (verdicts.size() != saliences.size()) {
    throw Error(ErrorCode::LengthMismatch, "verdicts and saliences differ in length");
  }
  std::vector<AcuOutcome> outcomes;
  outcomes.reserve(verdicts.size());
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    outcomes.push_back({verdicts[i].acu_id, verdicts[i].is_novel, saliences[i]});
  }
  return aggregate(std::move(doc_id), outcomes, params);
}

double recompute_novascore(const DocumentScore& score) {
  if (score.per_acu.empty()) return 0.0;
  double total = 0.0;
  for (const auto& a : score.per_acu) {
    const double weight = a.salient ? WeightParams::w_s : score.w_ns_used;
    if (a.is_novel) total += weight;
  }
  return total / static_cast<double>(score.per_acu.size());
}

std::vector<double> Range::values() const {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw Error(ErrorCode::InvalidArgument, "range needs lo <= hi and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

Range parse_range(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    auto colon = text.find(':', start);
    auto piece = std::string(text.substr(start, colon == std::string_view::npos ? text.npos : colon - start));
    try {
      std::size_t used = 0;
      double v = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument("trailing");
      parts.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad range '" + std::string(text) + "', want lo:hi:step");
    }
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "bad range '" + std::string(text) + "', want lo:hi:step");
  }
  Range r{parts[0], parts[1], parts[2]};
  (void)r.values();
  return r;
}

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::point_biserial: return "point_biserial";
    case Objective::pearson: return "pearson";
    case Objective::spearman: return "spearman";
    case Objective::kendall: return "kendall";
  }
  return "spearman";
}

Objective parse_objective(std::string_view text) {
  if (text == "point_biserial" || text == "pb") return Objective::point_biserial;
  if (text == "pearson") return Objective::pearson;
  if (text == "spearman") return Objective::spearman;
  if (text == "kendall") return Objective::kendall;
  throw Error(ErrorCode::InvalidArgument, "unknown objective '" + std::string(text) + "'");
}

namespace {

double objective_statistic(Objective objective, const std::vector<double>& scores,
                           const std::vector<double>& gold) {
  switch (objective) {
    case Objective::point_biserial: {
      std::vector<int> binary;
      for (double g : gold) binary.push_back(g >= 0.5 ? 1 : 0);
      return stats::point_biserial(binary, scores).statistic;
    }
    case Objective::pearson: return stats::pearson(scores, gold).statistic;
    case Objective::spearman: return stats::spearman(scores, gold).statistic;
    case Objective::kendall: return stats::kendall(scores, gold).statistic;
  }
  return 0.0;
}

// True when `a` should be preferred over `b` at equal statistic.
bool milder(const WeightParams& a, const WeightParams& b) {
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  const double da = std::abs(a.beta - 0.5);
  const double db = std::abs(b.beta - 0.5);
  if (da != db) return da < db;
  return a.gamma > b.gamma;
}

}  // namespace

GridResult grid_search(const ScoreFn& doc_scores, const GridSpec& spec) {
  constexpr double kTieTolerance = 1e-12;
  const auto alphas = spec.alpha.values();
  const auto betas = spec.beta.values();
  const auto gammas = spec.gamma.values();

  GridResult result;
  bool have_best = false;
  bool checked_labels = false;
  for (double a : alphas) {
    for (double b : betas) {
      for (double g : gammas) {
        WeightParams params{a, b, g};
        auto pairs = doc_scores(params);
        std::vector<double> scores, gold;
        for (const auto& [s, y] : pairs) {
          scores.push_back(s);
          gold.push_back(y);
        }
        if (!checked_labels) {
          if (pairs.size() < 3) {
            throw Error(ErrorCode::InvalidArgument, "grid search needs at least 3 labeled documents");
          }
          if (std::all_of(gold.begin(), gold.end(), [&](double y) { return y == gold.front(); })) {
            throw Error(ErrorCode::DegenerateLabels, "all gold values are identical");
          }
          checked_labels = true;
        }
        double statistic = std::numeric_limits<double>::quiet_NaN();
        try {
          statistic = objective_statistic(spec.objective, scores, gold);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ConstantInput && e.code() != ErrorCode::SingleClass) throw;
        }
        result.surface.push_back({params, statistic});
        if (std::isnan(statistic)) continue;
        if (!have_best || statistic > result.best_statistic + kTieTolerance ||
            (std::abs(statistic - result.best_statistic) <= kTieTolerance &&
             milder(params, result.best))) {
          result.best = params;
          result.best_statistic = statistic;
          have_best = true;
        }
      }
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::ConstantInput, "objective undefined at every lattice point");
  }
  return result;
}

void write_surface_csv(std::ostream& out, const GridResult& result) {
  out << "alpha,beta,gamma,statistic\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& p : result.surface) {
    line.str("");
    line << p.params.alpha << ',' << p.params.beta << ',' << p.params.gamma << ',';
    if (std::isnan(p.statistic)) {
      line << "nan";
    } else {
      line << p.statistic;
    }
    out << line.str() << '\n';
  }
}

}  // namespace novascore
