#pragma once

#include <cstddef>
#include <vector>

namespace kan {

/// Knot layout for one input dimension of one layer: a primary partition of
/// G intervals plus k uniformly spaced extension knots on each side. The
/// basis built on the augmented vector has exactly G + k functions.
struct KnotVector {
  std::vector<double> primary;    // G+1 non-decreasing breakpoints, positive span
  int order_k = 3;
  std::vector<double> augmented;  // G+1+2k knots

  std::size_t grid_intervals() const { return primary.size() - 1; }           // G
  std::size_t basis_count() const { return grid_intervals() + order_k; }      // G+k
  double span_lo() const { return primary.front(); }
  double span_hi() const { return primary.back(); }
};

/// Extends `primary` by k knots on each side, spaced h = span/G apart.
/// Throws "zero-span grid" when all breakpoints coincide.
KnotVector augment_knots(std::vector<double> primary, int order_k);

/// Uniform primary partition of [lo, hi] into G intervals, augmented.
KnotVector uniform_knots(double lo, double hi, std::size_t grid_intervals, int order_k);

/// B_1(x) .. B_{G+k}(x). x outside the primary span is allowed and yields the
/// natural recursion values (no clamping).
std::vector<double> eval_basis(double x, const KnotVector& kv);

/// r-th derivative of each basis function, r in {0, 1, 2}; r = 0 matches
/// eval_basis exactly.
std::vector<double> eval_basis_deriv(double x, const KnotVector& kv, int r);

/// Batch form used by the network engine: fills out[r][q * n + s] for
/// derivative orders 0..max_deriv (max_deriv <= 3).
void eval_basis_batch(const KnotVector& kv, const double* xs, std::size_t n, int max_deriv,
                      double* const out[4]);

}  // namespace kan
