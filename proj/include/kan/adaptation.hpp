#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kan/common.hpp"
#include "kan/network.hpp"

namespace kan {

/// Per-sample positive weights defining the empirical importance density over
/// a batch; normalizing them (pmf) gives the probability mass each sample
/// carries during knot allocation.
struct ImportanceWeights {
  std::vector<double> w;

  std::vector<double> pmf() const;
};

enum class StrategyKind { InputBased, CurvatureBased };

struct AdaptationStrategy {
  StrategyKind kind = StrategyKind::InputBased;
  double epsilon = 1e-8;  // smoothing constant, curvature only

  static AdaptationStrategy input_based() { return {StrategyKind::InputBased, 1e-8}; }
  static AdaptationStrategy curvature_based(double eps = 1e-8) {
    return {StrategyKind::CurvatureBased, eps};
  }
};

ImportanceWeights uniform_weights(std::size_t n);

/// Aggregated |second partial| of the layer's own map along input axis `axis`
/// at each batch sample, plus epsilon. Throws (naming the sample) on
/// non-finite derivatives.
ImportanceWeights curvature_weights(const LayerParams& layer, const Mat& batch, std::size_t axis,
                                    double epsilon);

/// All input axes at once; shares one forward/jet cache across axes.
std::vector<ImportanceWeights> curvature_weights_all(const LayerParams& layer, const Mat& batch,
                                                     double epsilon);

/// Weighted-quantile breakpoints: t_0 = min sample, t_G = max sample, interior
/// t_m at the first sorted sample whose cumulative mass reaches m/G.
/// Coinciding breakpoints are nudged up by 1e-9 * span, cascading. Output is
/// strictly increasing. Throws "degenerate activation range" when all samples
/// coincide.
std::vector<double> allocate_knots(std::span<const double> samples, const ImportanceWeights& w,
                                   std::size_t grid_intervals);

/// Least-squares transfer of each edge's spline onto new knots (ridge
/// lambda = 1e-8), one shared design matrix per input dimension. Returns the
/// new coefficient tensor (n_out x n_in x basis_count(new)).
std::vector<double> refit_coefficients(const LayerParams& old_params,
                                       const std::vector<KnotVector>& new_knots, const Mat& batch);

/// Front-to-back reallocation at grid size g_new: capture each layer's inputs
/// through already-updated upstream layers, compute per-dimension weights,
/// allocate + augment knots, refit coefficients. r and c are untouched.
void adapt_network(Network& net, const Mat& batch, const AdaptationStrategy& strategy,
                   std::size_t g_new);

}  // namespace kan
