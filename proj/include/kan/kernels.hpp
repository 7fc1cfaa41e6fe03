#pragma once

#include <cstddef>
#include <string>

namespace kan::kernels {

// Batch kernels behind a runtime-dispatched lane. Both lanes execute the same
// per-element FMA chains (reductions use a fixed 4-way stripe), so results are
// bit-identical whichever lane runs. Matrices are feature-major: `mat` holds
// `m` rows of `n` contiguous samples.

enum class Lane { Scalar, Avx2 };

Lane active_lane();
void force_lane(Lane lane);   // throws if the lane is unsupported on this CPU
bool cpu_supports_avx2();
std::string lane_name(Lane lane);

/// dst[s] += sum_q coef[q] * mat[q][s]
void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n);

/// out[q] += dot(vec, mat[q]) using the striped 4-accumulator reduction
void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n);

/// dst[s] += sum_q a[q][s] * b[q][s]
void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n);

/// dst[s] += a[s] * b[s]
void mul_accum(double* dst, const double* a, const double* b, std::size_t n);

/// dst[s] += a[s] * b[s] * c[s]   (rounded as (a*b) then fma with c)
void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n);

/// dst[s] += alpha * x[s]
void axpy(double* dst, double alpha, const double* x, std::size_t n);

/// B-spline basis values and derivatives for a block of samples.
///
/// knots: augmented non-decreasing knot vector (nknots entries), order k.
/// Writes basis function q's r-th derivative at xs[s] to out[r][q * n + s]
/// for q in [0, nknots-k-1) and r in [0, max_deriv]. out[r] may be null for
/// r > max_deriv. Level-0 intervals are half-open with the last augmented
/// interval closed; zero-length spans contribute zero (their reciprocals are
/// stored as 0).
void basis_block(const double* knots, std::size_t nknots, int order_k, const double* xs,
                 std::size_t n, int max_deriv, double* const out[4]);

}  // namespace kan::kernels
