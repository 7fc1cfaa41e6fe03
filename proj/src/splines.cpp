#include "kan/splines.hpp"

#include <algorithm>

#include "kan/common.hpp"
#include "kan/kernels.hpp"

namespace kan {

KnotVector augment_knots(std::vector<double> primary, int order_k) {
  require(order_k >= 0, "augment_knots: negative order");
  require(primary.size() >= 2, "augment_knots: need at least two breakpoints");
  require(std::is_sorted(primary.begin(), primary.end()), "augment_knots: breakpoints not sorted");
  const double span = primary.back() - primary.front();
  if (!(span > 0.0)) fail("zero-span grid");

  const std::size_t g = primary.size() - 1;
  const double h = span / static_cast<double>(g);

  KnotVector kv;
  kv.order_k = order_k;
  kv.augmented.reserve(primary.size() + 2 * static_cast<std::size_t>(order_k));
  for (int j = order_k; j >= 1; --j) kv.augmented.push_back(primary.front() - j * h);
  kv.augmented.insert(kv.augmented.end(), primary.begin(), primary.end());
  for (int j = 1; j <= order_k; ++j) kv.augmented.push_back(primary.back() + j * h);
  kv.primary = std::move(primary);
  return kv;
}

KnotVector uniform_knots(double lo, double hi, std::size_t grid_intervals, int order_k) {
  require(grid_intervals >= 1, "uniform_knots: need at least one interval");
  require(hi > lo, "uniform_knots: empty span");
  std::vector<double> primary(grid_intervals + 1);
  for (std::size_t i = 0; i <= grid_intervals; ++i)
    primary[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_intervals);
  primary.back() = hi;
  return augment_knots(std::move(primary), order_k);
}

void eval_basis_batch(const KnotVector& kv, const double* xs, std::size_t n, int max_deriv,
                      double* const out[4]) {
  kernels::basis_block(kv.augmented.data(), kv.augmented.size(), kv.order_k, xs, n, max_deriv,
                       out);
}

std::vector<double> eval_basis_deriv(double x, const KnotVector& kv, int r) {
  require(r >= 0 && r <= 2, "eval_basis_deriv: derivative order must be in {0,1,2}");
  const std::size_t nb = kv.basis_count();
  std::vector<double> all(static_cast<std::size_t>(r + 1) * nb);
  double* out[4] = {nullptr, nullptr, nullptr, nullptr};
  for (int q = 0; q <= r; ++q) out[q] = all.data() + static_cast<std::size_t>(q) * nb;
  eval_basis_batch(kv, &x, 1, r, out);
  return std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(r) * nb,
                             all.begin() + static_cast<std::ptrdiff_t>(r + 1) * nb);
}

std::vector<double> eval_basis(double x, const KnotVector& kv) {
  return eval_basis_deriv(x, kv, 0);
}

}  // namespace kan
