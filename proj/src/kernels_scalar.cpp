#include <vector>

#include "kernels_detail.hpp"

namespace kan::kernels::detail::scalar {

void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n) {
  for (std::size_t q = 0; q < m; ++q) {
    const double c = coef[q];
    const double* row = mat + q * n;
    for (std::size_t s = 0; s < n; ++s) dst[s] = std::fma(c, row[s], dst[s]);
  }
}

void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n) {
  for (std::size_t q = 0; q < m; ++q) {
    const double* row = mat + q * n;
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    std::size_t s = 0;
    for (; s + 4 <= n; s += 4) {
      l0 = std::fma(vec[s + 0], row[s + 0], l0);
      l1 = std::fma(vec[s + 1], row[s + 1], l1);
      l2 = std::fma(vec[s + 2], row[s + 2], l2);
      l3 = std::fma(vec[s + 3], row[s + 3], l3);
    }
    double lane[4] = {l0, l1, l2, l3};
    for (; s < n; ++s) lane[s & 3] = std::fma(vec[s], row[s], lane[s & 3]);
    out[q] += (lane[0] + lane[2]) + (lane[1] + lane[3]);
  }
}

void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n) {
  for (std::size_t q = 0; q < m; ++q) {
    const double* ra = a + q * n;
    const double* rb = b + q * n;
    for (std::size_t s = 0; s < n; ++s) dst[s] = std::fma(ra[s], rb[s], dst[s]);
  }
}

void mul_accum(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t s = 0; s < n; ++s) dst[s] = std::fma(a[s], b[s], dst[s]);
}

void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n) {
  for (std::size_t s = 0; s < n; ++s) {
    const double ab = a[s] * b[s];
    dst[s] = std::fma(ab, c[s], dst[s]);
  }
}

void axpy(double* dst, double alpha, const double* x, std::size_t n) {
  for (std::size_t s = 0; s < n; ++s) dst[s] = std::fma(alpha, x[s], dst[s]);
}

void basis_block(const double* knots, std::size_t nknots, int order_k, const double* recip,
                 const double* xs, std::size_t n, int max_deriv, double* const out[4]) {
  const std::size_t nb0 = nknots - 1;
  const std::size_t nbasis = nknots - static_cast<std::size_t>(order_k) - 1;
  std::vector<double> work(4 * nb0);
  for (std::size_t s = 0; s < n; ++s) {
    basis_sample(knots, nknots, order_k, recip, xs[s], max_deriv, work.data(), nb0);
    for (int r = 0; r <= max_deriv; ++r) {
      double* o = out[r];
      const double* w = work.data() + static_cast<std::size_t>(r) * nb0;
      for (std::size_t q = 0; q < nbasis; ++q) o[q * n + s] = w[q];
    }
  }
}

}  // namespace kan::kernels::detail::scalar
