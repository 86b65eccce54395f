#pragma once

// Document-level aggregation of ACU novelty and salience, and the lattice
// search over the weight-curve parameters.

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "novascore/core_model.hpp"

namespace novascore {

// clamp(min(w_s, alpha * (p_s - beta)^3 + gamma), 0, 1) for p_s in [0, 1].
double non_salient_weight(const WeightParams& params, double salience_ratio);

struct AcuOutcome {
  std::string acu_id;
  bool is_novel = false;
  bool salient = false;
};

// Sum of N_i * (w_s * S_i + w_ns * (1 - S_i)) over n ACUs, divided by n.
// Throws Error(EmptyDocument) when there are no ACUs.
DocumentScore aggregate(std::string doc_id, std::span<const AcuOutcome> outcomes,
                        const WeightParams& params);

// Verdicts and salience flags aligned by index.
DocumentScore novascore(std::string doc_id, std::span<const NoveltyVerdict> verdicts,
                        std::span<const bool> saliences, const WeightParams& params);

// Recomputes the score from the per-ACU breakdown alone.
double recompute_novascore(const DocumentScore& score);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  // lo + i * step for i = 0.. while <= hi (inclusive within 1e-9),
  // rounded to 12 decimals.
  std::vector<double> values() const;
};

// Parses "lo:hi:step". Throws Error(InvalidArgument).
Range parse_range(std::string_view text);

enum class Objective { point_biserial, pearson, spearman, kendall };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view text);

struct GridSpec {
  Range alpha{0.0, 2.0, 0.25};
  Range beta{0.0, 0.8, 0.1};
  Range gamma{0.5, 1.0, 0.05};
  Objective objective = Objective::spearman;
};

struct GridPoint {
  WeightParams params;
  double statistic = 0.0;  // NaN when the objective is undefined at this point
};

struct GridResult {
  WeightParams best;
  double best_statistic = 0.0;
  std::vector<GridPoint> surface;
};

// For given parameters, the (score, gold numeric) pair of every labeled
// document.
using ScoreFn = std::function<std::vector<std::pair<double, double>>(const WeightParams&)>;

// Evaluates the objective at every lattice point and returns the maximum.
// Statistics within 1e-12 of each other tie; ties go to smaller alpha, then
// beta closer to 0.5, then larger gamma.
GridResult grid_search(const ScoreFn& doc_scores, const GridSpec& spec);

// alpha,beta,gamma,statistic with a header row.
void write_surface_csv(std::ostream& out, const GridResult& result);

}  // namespace novascore
