#include "kan/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kan/kernels.hpp"

namespace kan {

std::vector<double> ImportanceWeights::pmf() const {
  double total = 0.0;
  for (double x : w) total += x;
  require(total > 0.0, "ImportanceWeights: total mass must be positive");
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] / total;
  return p;
}

ImportanceWeights uniform_weights(std::size_t n) {
  require(n >= 1, "uniform_weights: empty batch");
  return {std::vector<double>(n, 1.0)};
}

std::vector<ImportanceWeights> curvature_weights_all(const LayerParams& layer, const Mat& batch,
                                                     double epsilon) {
  require(epsilon > 0.0, "curvature_weights: epsilon must be positive");
  require(batch.rows == layer.n_in, "curvature_weights: batch width mismatch");
  Network one;
  one.widths = {layer.n_in, layer.n_out};
  one.order_k = layer.order_k;
  one.layers.push_back(layer);

  ForwardCache fc;
  network_forward_batch(one, batch, 2, fc);
  EdgePhi ep;
  build_edge_phi(one, fc, ep);

  const std::size_t n = batch.cols;
  std::vector<ImportanceWeights> out(layer.n_in);
  JetState js;
  for (std::size_t axis = 0; axis < layer.n_in; ++axis) {
    jet_forward_batch(one, fc, ep, axis, js);
    std::vector<double>& w = out[axis].w;
    w.assign(n, epsilon);
    for (std::size_t j = 0; j < layer.n_out; ++j) {
      const double* zj = js.w.back().row(j);
      for (std::size_t s = 0; s < n; ++s) w[s] += std::fabs(zj[s]);
    }
    for (std::size_t s = 0; s < n; ++s)
      if (!std::isfinite(w[s]))
        fail("curvature_weights: non-finite second derivative at sample " + std::to_string(s));
  }
  return out;
}

ImportanceWeights curvature_weights(const LayerParams& layer, const Mat& batch, std::size_t axis,
                                    double epsilon) {
  require(axis < layer.n_in, "curvature_weights: axis out of range");
  return curvature_weights_all(layer, batch, epsilon)[axis];
}

std::vector<double> allocate_knots(std::span<const double> samples, const ImportanceWeights& w,
                                   std::size_t grid_intervals) {
  const std::size_t n = samples.size();
  require(n >= 2, "allocate_knots: need at least two samples");
  require(w.w.size() == n, "allocate_knots: weight count mismatch");
  require(grid_intervals >= 1, "allocate_knots: need at least one interval");
  for (double x : w.w) require(x > 0.0, "allocate_knots: weights must be strictly positive");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });

  const double lo = samples[idx.front()];
  const double hi = samples[idx.back()];
  if (!(hi > lo)) fail("degenerate activation range");

  const std::vector<double> p = w.pmf();
  std::vector<double> knots(grid_intervals + 1);
  knots.front() = lo;
  knots.back() = hi;

  // Interior breakpoints: first sorted sample whose cumulative mass reaches
  // the quantile level m/G.
  std::size_t pos = 0;
  double cum = p[idx[0]];
  for (std::size_t m = 1; m < grid_intervals; ++m) {
    const double level = static_cast<double>(m) / static_cast<double>(grid_intervals);
    while (cum < level && pos + 1 < n) {
      ++pos;
      cum += p[idx[pos]];
    }
    knots[m] = samples[idx[pos]];
  }

  // Heavy weight ties can collapse neighbours; nudge upward, cascading.
  const double nudge = 1e-9 * (hi - lo);
  for (std::size_t m = 1; m <= grid_intervals; ++m)
    if (knots[m] <= knots[m - 1]) knots[m] = knots[m - 1] + nudge;
  return knots;
}

namespace {

// Solves (G + lambda I) X = RHS for SPD G via Cholesky; G is m x m row-major.
void cholesky_solve(std::vector<double>& gram, std::size_t m, double lambda, Mat& rhs,
                    const std::string& context) {
  for (std::size_t i = 0; i < m; ++i) gram[i * m + i] += lambda;
  // factor
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = gram[i * m + j];
      for (std::size_t q = 0; q < j; ++q) sum -= gram[i * m + q] * gram[j * m + q];
      if (i == j) {
        if (!(sum > 0.0)) fail("refit_coefficients: rank-deficient system in " + context);
        gram[i * m + i] = std::sqrt(sum);
      } else {
        gram[i * m + j] = sum / gram[j * m + j];
      }
    }
  }
  // solve for each rhs row (rhs is n_rhs x m)
  for (std::size_t r = 0; r < rhs.rows; ++r) {
    double* y = rhs.row(r);
    for (std::size_t i = 0; i < m; ++i) {
      double sum = y[i];
      for (std::size_t q = 0; q < i; ++q) sum -= gram[i * m + q] * y[q];
      y[i] = sum / gram[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
      double sum = y[i];
      for (std::size_t q = i + 1; q < m; ++q) sum -= gram[q * m + i] * y[q];
      y[i] = sum / gram[i * m + i];
    }
  }
}

}  // namespace

std::vector<double> refit_coefficients(const LayerParams& old_params,
                                       const std::vector<KnotVector>& new_knots,
                                       const Mat& batch) {
  const std::size_t n = batch.cols;
  require(n >= 1, "refit_coefficients: empty batch");
  require(new_knots.size() == old_params.n_in, "refit_coefficients: knot count mismatch");
  require(batch.rows == old_params.n_in, "refit_coefficients: batch width mismatch");

  const std::size_t nb_old = old_params.basis_count();
  const std::size_t nb_new = new_knots[0].basis_count();
  const double lambda = 1e-8;
  std::vector<double> b_new(old_params.n_out * old_params.n_in * nb_new, 0.0);

  Mat basis_old(nb_old, n), basis_new(nb_new, n);
  Mat targets(old_params.n_out, n);
  Mat rhs(old_params.n_out, nb_new);
  std::vector<double> gram(nb_new * nb_new);

  for (std::size_t i = 0; i < old_params.n_in; ++i) {
    require(new_knots[i].basis_count() == nb_new,
            "refit_coefficients: inconsistent basis count across dimensions");
    double* out_old[4] = {basis_old.v.data(), nullptr, nullptr, nullptr};
    eval_basis_batch(old_params.knots[i], batch.row(i), n, 0, out_old);
    double* out_new[4] = {basis_new.v.data(), nullptr, nullptr, nullptr};
    eval_basis_batch(new_knots[i], batch.row(i), n, 0, out_new);

    // old spline values per output
    targets.zero();
    for (std::size_t j = 0; j < old_params.n_out; ++j)
      kernels::vm_accum(targets.row(j), old_params.b_edge(j, i), basis_old.v.data(), nb_old, n);

    // shared design: gram = A A^T, rhs_j = A y_j
    std::fill(gram.begin(), gram.end(), 0.0);
    for (std::size_t m = 0; m < nb_new; ++m)
      kernels::mv_dots(gram.data() + m * nb_new, basis_new.row(m), basis_new.v.data(), nb_new, n);
    rhs.zero();
    for (std::size_t j = 0; j < old_params.n_out; ++j)
      kernels::mv_dots(rhs.row(j), targets.row(j), basis_new.v.data(), nb_new, n);

    cholesky_solve(gram, nb_new, lambda, rhs, "input dimension " + std::to_string(i));

    for (std::size_t j = 0; j < old_params.n_out; ++j)
      std::copy(rhs.row(j), rhs.row(j) + nb_new,
                b_new.begin() + static_cast<std::ptrdiff_t>((j * old_params.n_in + i) * nb_new));
  }
  return b_new;
}

void adapt_network(Network& net, const Mat& batch, const AdaptationStrategy& strategy,
                   std::size_t g_new) {
  require(batch.rows == net.n_inputs(), "adapt_network: batch width mismatch");
  Mat x = batch;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    LayerParams& p = net.layers[l];
    require(g_new >= p.knots[0].grid_intervals(), "adapt_network: grid may not shrink");

    std::vector<ImportanceWeights> weights;
    if (strategy.kind == StrategyKind::CurvatureBased) {
      weights = curvature_weights_all(p, x, strategy.epsilon);
    } else {
      weights.assign(p.n_in, uniform_weights(x.cols));
    }

    std::vector<KnotVector> new_knots;
    new_knots.reserve(p.n_in);
    for (std::size_t i = 0; i < p.n_in; ++i) {
      std::span<const double> row(x.row(i), x.cols);
      new_knots.push_back(augment_knots(allocate_knots(row, weights[i], g_new), p.order_k));
    }

    try {
      p.b = refit_coefficients(p, new_knots, x);
    } catch (const std::runtime_error& err) {
      fail("layer " + std::to_string(l) + ": " + err.what());
    }
    p.knots = std::move(new_knots);

    // inputs to the next layer come from the already-updated layer
    Network one;
    one.widths = {p.n_in, p.n_out};
    one.order_k = p.order_k;
    one.layers.push_back(p);
    x = network_eval(one, x);
  }
}

}  // namespace kan
