#pragma once

#include <cmath>
#include <cstddef>

// Lane implementations. Arithmetic here is mirrored statement-for-statement
// between the scalar and AVX2 translation units; any change to an FMA chain in
// one lane must be applied to the other or the bit-equivalence tests fail.

namespace kan::kernels::detail {

namespace scalar {
void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n);
void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n);
void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n);
void mul_accum(double* dst, const double* a, const double* b, std::size_t n);
void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n);
void axpy(double* dst, double alpha, const double* x, std::size_t n);
void basis_block(const double* knots, std::size_t nknots, int order_k, const double* recip,
                 const double* xs, std::size_t n, int max_deriv, double* const out[4]);
}  // namespace scalar

#ifdef KAN_HAVE_AVX2_TU
namespace avx2 {
void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n);
void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n);
void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n);
void mul_accum(double* dst, const double* a, const double* b, std::size_t n);
void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n);
void axpy(double* dst, double alpha, const double* x, std::size_t n);
void basis_block(const double* knots, std::size_t nknots, int order_k, const double* recip,
                 const double* xs, std::size_t n, int max_deriv, double* const out[4]);
}  // namespace avx2
#endif

/// One sample of the Cox-de Boor recursion with derivative orders up to
/// max_deriv (<= 3), carried through the levels by the product rule.
/// `work` holds 4 rows of (nknots-1) doubles. Shared by the scalar lane and
/// the AVX2 lane's tail handling so every sample sees identical arithmetic.
inline void basis_sample(const double* t, std::size_t nknots, int order_k, const double* recip,
                         double x, int max_deriv, double* work, std::size_t wstride) {
  const std::size_t nb0 = nknots - 1;
  double* b0 = work;
  double* b1 = work + wstride;
  double* b2 = work + 2 * wstride;
  double* b3 = work + 3 * wstride;

  for (std::size_t i = 0; i < nb0; ++i) {
    bool in = (x >= t[i]) && (x < t[i + 1]);
    if (i == nb0 - 1) in = in || (x == t[i + 1]);
    b0[i] = in ? 1.0 : 0.0;
    b1[i] = 0.0;
    b2[i] = 0.0;
    b3[i] = 0.0;
  }

  for (int p = 1; p <= order_k; ++p) {
    const double* rp = recip + static_cast<std::size_t>(p) * nknots;
    const std::size_t cnt = nknots - 1 - static_cast<std::size_t>(p);
    for (std::size_t i = 0; i < cnt; ++i) {
      const double rA = rp[i];
      const double rB = rp[i + 1];
      const double a = (x - t[i]) * rA;
      const double bq = (t[i + p + 1] - x) * rB;

      double v0 = bq * b0[i + 1];
      v0 = std::fma(a, b0[i], v0);
      double v1 = 0.0, v2 = 0.0, v3 = 0.0;
      if (max_deriv >= 1) {
        v1 = bq * b1[i + 1];
        v1 = std::fma(a, b1[i], v1);
        v1 = std::fma(-rB, b0[i + 1], v1);
        v1 = std::fma(rA, b0[i], v1);
      }
      if (max_deriv >= 2) {
        const double rA2 = rA + rA;
        const double rB2 = rB + rB;
        v2 = bq * b2[i + 1];
        v2 = std::fma(a, b2[i], v2);
        v2 = std::fma(-rB2, b1[i + 1], v2);
        v2 = std::fma(rA2, b1[i], v2);
        if (max_deriv >= 3) {
          const double rA3 = rA2 + rA;
          const double rB3 = rB2 + rB;
          v3 = bq * b3[i + 1];
          v3 = std::fma(a, b3[i], v3);
          v3 = std::fma(-rB3, b2[i + 1], v3);
          v3 = std::fma(rA3, b2[i], v3);
        }
      }
      b0[i] = v0;
      b1[i] = v1;
      b2[i] = v2;
      b3[i] = v3;
    }
  }
}

}  // namespace kan::kernels::detail
