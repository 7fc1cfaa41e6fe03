#ifdef KAN_HAVE_AVX2_TU

#include <immintrin.h>

#include <vector>

#include "kernels_detail.hpp"

namespace kan::kernels::detail::avx2 {

void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n) {
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    __m256d acc = _mm256_loadu_pd(dst + s);
    for (std::size_t q = 0; q < m; ++q)
      acc = _mm256_fmadd_pd(_mm256_set1_pd(coef[q]), _mm256_loadu_pd(mat + q * n + s), acc);
    _mm256_storeu_pd(dst + s, acc);
  }
  for (; s < n; ++s) {
    double acc = dst[s];
    for (std::size_t q = 0; q < m; ++q) acc = std::fma(coef[q], mat[q * n + s], acc);
    dst[s] = acc;
  }
}

void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n) {
  for (std::size_t q = 0; q < m; ++q) {
    const double* row = mat + q * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vec + s), _mm256_loadu_pd(row + s), acc);
    double lane[4];
    _mm256_storeu_pd(lane, acc);
    for (; s < n; ++s) lane[s & 3] = std::fma(vec[s], row[s], lane[s & 3]);
    out[q] += (lane[0] + lane[2]) + (lane[1] + lane[3]);
  }
}

void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n) {
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    __m256d acc = _mm256_loadu_pd(dst + s);
    for (std::size_t q = 0; q < m; ++q)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + q * n + s), _mm256_loadu_pd(b + q * n + s), acc);
    _mm256_storeu_pd(dst + s, acc);
  }
  for (; s < n; ++s) {
    double acc = dst[s];
    for (std::size_t q = 0; q < m; ++q) acc = std::fma(a[q * n + s], b[q * n + s], acc);
    dst[s] = acc;
  }
}

void mul_accum(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    __m256d acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + s), _mm256_loadu_pd(b + s),
                                  _mm256_loadu_pd(dst + s));
    _mm256_storeu_pd(dst + s, acc);
  }
  for (; s < n; ++s) dst[s] = std::fma(a[s], b[s], dst[s]);
}

void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n) {
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + s), _mm256_loadu_pd(b + s));
    __m256d acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + s), _mm256_loadu_pd(dst + s));
    _mm256_storeu_pd(dst + s, acc);
  }
  for (; s < n; ++s) {
    const double ab = a[s] * b[s];
    dst[s] = std::fma(ab, c[s], dst[s]);
  }
}

void axpy(double* dst, double alpha, const double* x, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    __m256d acc = _mm256_fmadd_pd(al, _mm256_loadu_pd(x + s), _mm256_loadu_pd(dst + s));
    _mm256_storeu_pd(dst + s, acc);
  }
  for (; s < n; ++s) dst[s] = std::fma(alpha, x[s], dst[s]);
}

namespace {

// 4 samples at once; `work` holds 4 derivative rows of nb0 lanes of 4.
inline void basis_quad(const double* t, std::size_t nknots, int order_k, const double* recip,
                       const double* xs, int max_deriv, double* work) {
  const std::size_t nb0 = nknots - 1;
  const __m256d x = _mm256_loadu_pd(xs);
  const __m256d one = _mm256_set1_pd(1.0);
  double* b0 = work;
  double* b1 = work + 4 * nb0;
  double* b2 = work + 8 * nb0;
  double* b3 = work + 12 * nb0;

  for (std::size_t i = 0; i < nb0; ++i) {
    __m256d mask = _mm256_and_pd(_mm256_cmp_pd(x, _mm256_set1_pd(t[i]), _CMP_GE_OQ),
                                 _mm256_cmp_pd(x, _mm256_set1_pd(t[i + 1]), _CMP_LT_OQ));
    if (i == nb0 - 1)
      mask = _mm256_or_pd(mask, _mm256_cmp_pd(x, _mm256_set1_pd(t[i + 1]), _CMP_EQ_OQ));
    _mm256_storeu_pd(b0 + 4 * i, _mm256_and_pd(mask, one));
    _mm256_storeu_pd(b1 + 4 * i, _mm256_setzero_pd());
    _mm256_storeu_pd(b2 + 4 * i, _mm256_setzero_pd());
    _mm256_storeu_pd(b3 + 4 * i, _mm256_setzero_pd());
  }

  for (int p = 1; p <= order_k; ++p) {
    const double* rp = recip + static_cast<std::size_t>(p) * nknots;
    const std::size_t cnt = nknots - 1 - static_cast<std::size_t>(p);
    for (std::size_t i = 0; i < cnt; ++i) {
      const __m256d rA = _mm256_set1_pd(rp[i]);
      const __m256d rB = _mm256_set1_pd(rp[i + 1]);
      const __m256d a = _mm256_mul_pd(_mm256_sub_pd(x, _mm256_set1_pd(t[i])), rA);
      const __m256d bq = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(t[i + p + 1]), x), rB);

      const __m256d c0 = _mm256_loadu_pd(b0 + 4 * i);
      const __m256d c0n = _mm256_loadu_pd(b0 + 4 * (i + 1));
      __m256d v0 = _mm256_mul_pd(bq, c0n);
      v0 = _mm256_fmadd_pd(a, c0, v0);
      __m256d v1 = _mm256_setzero_pd(), v2 = _mm256_setzero_pd(), v3 = _mm256_setzero_pd();
      if (max_deriv >= 1) {
        const __m256d c1 = _mm256_loadu_pd(b1 + 4 * i);
        const __m256d c1n = _mm256_loadu_pd(b1 + 4 * (i + 1));
        v1 = _mm256_mul_pd(bq, c1n);
        v1 = _mm256_fmadd_pd(a, c1, v1);
        v1 = _mm256_fnmadd_pd(rB, c0n, v1);
        v1 = _mm256_fmadd_pd(rA, c0, v1);
        if (max_deriv >= 2) {
          const double rA2s = rp[i] + rp[i];
          const double rB2s = rp[i + 1] + rp[i + 1];
          const __m256d rA2 = _mm256_set1_pd(rA2s);
          const __m256d rB2 = _mm256_set1_pd(rB2s);
          const __m256d c2 = _mm256_loadu_pd(b2 + 4 * i);
          const __m256d c2n = _mm256_loadu_pd(b2 + 4 * (i + 1));
          v2 = _mm256_mul_pd(bq, c2n);
          v2 = _mm256_fmadd_pd(a, c2, v2);
          v2 = _mm256_fnmadd_pd(rB2, c1n, v2);
          v2 = _mm256_fmadd_pd(rA2, c1, v2);
          if (max_deriv >= 3) {
            const __m256d rA3 = _mm256_set1_pd(rA2s + rp[i]);
            const __m256d rB3 = _mm256_set1_pd(rB2s + rp[i + 1]);
            const __m256d c3 = _mm256_loadu_pd(b3 + 4 * i);
            const __m256d c3n = _mm256_loadu_pd(b3 + 4 * (i + 1));
            v3 = _mm256_mul_pd(bq, c3n);
            v3 = _mm256_fmadd_pd(a, c3, v3);
            v3 = _mm256_fnmadd_pd(rB3, c2n, v3);
            v3 = _mm256_fmadd_pd(rA3, c2, v3);
          }
        }
      }
      _mm256_storeu_pd(b0 + 4 * i, v0);
      _mm256_storeu_pd(b1 + 4 * i, v1);
      _mm256_storeu_pd(b2 + 4 * i, v2);
      _mm256_storeu_pd(b3 + 4 * i, v3);
    }
  }
}

}  // namespace

void basis_block(const double* knots, std::size_t nknots, int order_k, const double* recip,
                 const double* xs, std::size_t n, int max_deriv, double* const out[4]) {
  const std::size_t nb0 = nknots - 1;
  const std::size_t nbasis = nknots - static_cast<std::size_t>(order_k) - 1;
  std::vector<double> work(16 * nb0);
  std::size_t s = 0;
  for (; s + 4 <= n; s += 4) {
    basis_quad(knots, nknots, order_k, recip, xs + s, max_deriv, work.data());
    for (int r = 0; r <= max_deriv; ++r) {
      double* o = out[r];
      const double* w = work.data() + static_cast<std::size_t>(r) * 4 * nb0;
      for (std::size_t q = 0; q < nbasis; ++q) {
        o[q * n + s + 0] = w[4 * q + 0];
        o[q * n + s + 1] = w[4 * q + 1];
        o[q * n + s + 2] = w[4 * q + 2];
        o[q * n + s + 3] = w[4 * q + 3];
      }
    }
  }
  for (; s < n; ++s) {
    basis_sample(knots, nknots, order_k, recip, xs[s], max_deriv, work.data(), nb0);
    for (int r = 0; r <= max_deriv; ++r) {
      double* o = out[r];
      const double* w = work.data() + static_cast<std::size_t>(r) * nb0;
      for (std::size_t q = 0; q < nbasis; ++q) o[q * n + s] = w[q];
    }
  }
}

}  // namespace kan::kernels::detail::avx2

#endif  // KAN_HAVE_AVX2_TU
