#include <doctest.h>

#include <cmath>
#include <vector>

#include "kan/common.hpp"
#include "kan/kernels.hpp"
#include "kan/splines.hpp"

using namespace kan;

namespace {

struct LaneGuard {
  kernels::Lane saved;
  LaneGuard() : saved(kernels::active_lane()) {}
  ~LaneGuard() { kernels::force_lane(saved); }
};

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("vm_accum accumulates coef-weighted rows") {
  // 2x3 matrix, hand-checked
  const double mat[6] = {1, 2, 3, 4, 5, 6};
  const double coef[2] = {2.0, -1.0};
  double dst[3] = {10, 20, 30};
  kernels::vm_accum(dst, coef, mat, 2, 3);
  CHECK(dst[0] == doctest::Approx(10 + 2 * 1 - 4));
  CHECK(dst[1] == doctest::Approx(20 + 2 * 2 - 5));
  CHECK(dst[2] == doctest::Approx(30 + 2 * 3 - 6));
}

TEST_CASE("mv_dots accumulates row dots") {
  const double mat[6] = {1, 2, 3, 4, 5, 6};
  const double vec[3] = {1, 1, 2};
  double out[2] = {1.0, 0.0};
  kernels::mv_dots(out, vec, mat, 2, 3);
  CHECK(out[0] == doctest::Approx(1 + 1 + 2 + 6));
  CHECK(out[1] == doctest::Approx(4 + 5 + 12));
}

TEST_CASE("scalar and avx2 lanes are bit-identical") {
  if (!kernels::cpu_supports_avx2()) return;
  LaneGuard guard;
  Rng rng(1234);

  // sizes straddle the 4-wide blocks to exercise vector tails
  for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 257u}) {
    const std::size_t m = 7;
    const auto mat = random_vec(rng, m * n);
    const auto mat2 = random_vec(rng, m * n);
    const auto coef = random_vec(rng, m);
    const auto vec = random_vec(rng, n);
    const auto vec2 = random_vec(rng, n);
    const auto vec3 = random_vec(rng, n);

    auto run_all = [&](kernels::Lane lane) {
      kernels::force_lane(lane);
      std::vector<double> a(n, 0.5), b(m, 0.25), c(n, -0.5), d(n, 1.0), e(n, 2.0);
      kernels::vm_accum(a.data(), coef.data(), mat.data(), m, n);
      kernels::mv_dots(b.data(), vec.data(), mat.data(), m, n);
      kernels::rows_mul_accum(c.data(), mat.data(), mat2.data(), m, n);
      kernels::mul_accum(d.data(), vec.data(), vec2.data(), n);
      kernels::mul3_accum(e.data(), vec.data(), vec2.data(), vec3.data(), n);
      kernels::axpy(e.data(), 1.75, vec3.data(), n);
      std::vector<double> all;
      for (auto* v : {&a, &b, &c, &d, &e}) all.insert(all.end(), v->begin(), v->end());
      return all;
    };
    const auto scalar = run_all(kernels::Lane::Scalar);
    const auto avx2 = run_all(kernels::Lane::Avx2);
    REQUIRE(scalar.size() == avx2.size());
    for (std::size_t i = 0; i < scalar.size(); ++i) CHECK(scalar[i] == avx2[i]);
  }
}

TEST_CASE("basis_block lanes agree bitwise including derivatives") {
  if (!kernels::cpu_supports_avx2()) return;
  LaneGuard guard;
  Rng rng(99);
  const KnotVector kv = uniform_knots(-1.0, 1.0, 6, 3);
  const std::size_t n = 103;  // non-multiple of 4
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.uniform(-1.6, 1.6);  // includes out-of-span points
  const std::size_t nb = kv.basis_count();

  auto run = [&](kernels::Lane lane) {
    kernels::force_lane(lane);
    std::vector<double> buf(4 * nb * n);
    double* out[4];
    for (int r = 0; r < 4; ++r) out[r] = buf.data() + static_cast<std::size_t>(r) * nb * n;
    kernels::basis_block(kv.augmented.data(), kv.augmented.size(), kv.order_k, xs.data(), n, 3,
                         out);
    return buf;
  };
  const auto scalar = run(kernels::Lane::Scalar);
  const auto avx2 = run(kernels::Lane::Avx2);
  for (std::size_t i = 0; i < scalar.size(); ++i) CHECK(scalar[i] == avx2[i]);
}

TEST_CASE("forced lane selection round-trips") {
  LaneGuard guard;
  kernels::force_lane(kernels::Lane::Scalar);
  CHECK(kernels::active_lane() == kernels::Lane::Scalar);
  CHECK(kernels::lane_name(kernels::Lane::Scalar) == "scalar");
  if (kernels::cpu_supports_avx2()) {
    kernels::force_lane(kernels::Lane::Avx2);
    CHECK(kernels::active_lane() == kernels::Lane::Avx2);
  }
}
