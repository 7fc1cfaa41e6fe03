#include "kan/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <vector>

#include "kan/common.hpp"
#include "kernels_detail.hpp"

namespace kan::kernels {

bool cpu_supports_avx2() {
#ifdef KAN_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Lane detect_lane() {
  if (const char* env = std::getenv("KAN_KERNEL_LANE")) {
    if (std::strcmp(env, "scalar") == 0) return Lane::Scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_supports_avx2()) fail("KAN_KERNEL_LANE=avx2 but CPU lacks AVX2/FMA");
      return Lane::Avx2;
    }
    if (std::strcmp(env, "auto") != 0)
      fail(std::string("unknown KAN_KERNEL_LANE value: ") + env);
  }
  return cpu_supports_avx2() ? Lane::Avx2 : Lane::Scalar;
}

Lane& lane_ref() {
  static Lane lane = detect_lane();
  return lane;
}

}  // namespace

Lane active_lane() { return lane_ref(); }

void force_lane(Lane lane) {
  if (lane == Lane::Avx2 && !cpu_supports_avx2()) fail("AVX2 lane unsupported on this CPU");
  lane_ref() = lane;
}

std::string lane_name(Lane lane) { return lane == Lane::Avx2 ? "avx2" : "scalar"; }

#ifdef KAN_HAVE_AVX2_TU
#define KAN_DISPATCH(fn, ...)                     \
  if (lane_ref() == Lane::Avx2) {                 \
    detail::avx2::fn(__VA_ARGS__);                \
  } else {                                        \
    detail::scalar::fn(__VA_ARGS__);              \
  }
#else
#define KAN_DISPATCH(fn, ...) detail::scalar::fn(__VA_ARGS__)
#endif

void vm_accum(double* dst, const double* coef, const double* mat, std::size_t m, std::size_t n) {
  KAN_DISPATCH(vm_accum, dst, coef, mat, m, n);
}

void mv_dots(double* out, const double* vec, const double* mat, std::size_t m, std::size_t n) {
  KAN_DISPATCH(mv_dots, out, vec, mat, m, n);
}

void rows_mul_accum(double* dst, const double* a, const double* b, std::size_t m, std::size_t n) {
  KAN_DISPATCH(rows_mul_accum, dst, a, b, m, n);
}

void mul_accum(double* dst, const double* a, const double* b, std::size_t n) {
  KAN_DISPATCH(mul_accum, dst, a, b, n);
}

void mul3_accum(double* dst, const double* a, const double* b, const double* c, std::size_t n) {
  KAN_DISPATCH(mul3_accum, dst, a, b, c, n);
}

void axpy(double* dst, double alpha, const double* x, std::size_t n) {
  KAN_DISPATCH(axpy, dst, alpha, x, n);
}

void basis_block(const double* knots, std::size_t nknots, int order_k, const double* xs,
                 std::size_t n, int max_deriv, double* const out[4]) {
  require(nknots >= 2, "basis_block: need at least two knots");
  require(order_k >= 0 && nknots > static_cast<std::size_t>(order_k) + 1,
          "basis_block: knot vector too short for order");
  require(max_deriv >= 0 && max_deriv <= 3, "basis_block: derivative order out of range");

  // Reciprocal spans are sample-independent; precompute once and share between
  // lanes so both see identical values. Zero-length spans map to 0.
  std::vector<double> recip(static_cast<std::size_t>(order_k + 1) * nknots, 0.0);
  for (int p = 1; p <= order_k; ++p) {
    for (std::size_t i = 0; i + static_cast<std::size_t>(p) < nknots; ++i) {
      const double span = knots[i + p] - knots[i];
      recip[static_cast<std::size_t>(p) * nknots + i] = span > 0.0 ? 1.0 / span : 0.0;
    }
  }
  KAN_DISPATCH(basis_block, knots, nknots, order_k, recip.data(), xs, n, max_deriv, out);
}

#undef KAN_DISPATCH

}  // namespace kan::kernels
