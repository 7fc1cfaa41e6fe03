#include <doctest.h>

#include <cmath>

#include "kan/common.hpp"
#include "kan/splines.hpp"

using namespace kan;

TEST_CASE("augment_knots extends uniformly by span/G") {
  SUBCASE("unit span, k=1") {
    const KnotVector kv = augment_knots({0.0, 1.0}, 1);
    REQUIRE(kv.augmented.size() == 4);
    CHECK(kv.augmented[0] == -1.0);
    CHECK(kv.augmented[1] == 0.0);
    CHECK(kv.augmented[2] == 1.0);
    CHECK(kv.augmented[3] == 2.0);
  }
  SUBCASE("k=0 adds nothing") {
    const KnotVector kv = augment_knots({0.0, 0.5, 1.0}, 0);
    CHECK(kv.augmented == std::vector<double>{0.0, 0.5, 1.0});
  }
  SUBCASE("five breakpoints, k=3") {
    const KnotVector kv = augment_knots({-1.0, -0.5, 0.0, 0.5, 1.0}, 3);
    REQUIRE(kv.augmented.size() == 11);
    CHECK(kv.augmented.front() == doctest::Approx(-2.5).epsilon(1e-15));
    CHECK(kv.augmented.back() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(kv.basis_count() == 7);
  }
  SUBCASE("middle segment equals primary") {
    const KnotVector kv = augment_knots({0.0, 0.25, 0.9, 2.0}, 3);
    for (std::size_t i = 0; i < kv.primary.size(); ++i)
      CHECK(kv.augmented[3 + i] == kv.primary[i]);
  }
  SUBCASE("zero span rejected") {
    CHECK_THROWS_WITH_AS(augment_knots({1.0, 1.0, 1.0}, 2), "zero-span grid",
                         std::runtime_error);
  }
}

TEST_CASE("degree-0 basis is the half-open indicator") {
  const KnotVector kv = augment_knots({0.0, 1.0, 2.0}, 0);
  const auto at_half = eval_basis(0.5, kv);
  REQUIRE(at_half.size() == 2);
  CHECK(at_half[0] == 1.0);
  CHECK(at_half[1] == 0.0);
  const auto at_knot = eval_basis(1.0, kv);
  CHECK(at_knot[0] == 0.0);
  CHECK(at_knot[1] == 1.0);
  // last interval closed
  const auto at_end = eval_basis(2.0, kv);
  CHECK(at_end[1] == 1.0);
}

TEST_CASE("uniform cubic at an interior knot gives 1/6, 2/3, 1/6") {
  const KnotVector kv = augment_knots({0, 1, 2, 3, 4, 5, 6}, 3);
  const auto vals = eval_basis(3.0, kv);
  REQUIRE(vals.size() == 9);
  std::vector<double> nonzero;
  for (double v : vals)
    if (v != 0.0) nonzero.push_back(v);
  REQUIRE(nonzero.size() == 3);
  CHECK(nonzero[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(nonzero[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(nonzero[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("partition of unity over random in-span points") {
  Rng rng(7);
  const KnotVector kv = augment_knots({-1.0, -0.7, -0.1, 0.4, 0.55, 1.0}, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = rng.uniform(-1.0, 1.0);
    const auto vals = eval_basis(x, kv);
    double sum = 0.0;
    for (double v : vals) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-10);
  }
  // continuity closes the span end
  double sum_end = 0.0;
  for (double v : eval_basis(1.0, kv)) sum_end += v;
  CHECK(std::fabs(sum_end - 1.0) < 1e-12);
}

TEST_CASE("derivative order 0 equals eval_basis bitwise and order 1 sums to zero") {
  Rng rng(11);
  const KnotVector kv = uniform_knots(-1.0, 1.0, 5, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = rng.uniform(-1.0, 1.0);
    const auto b = eval_basis(x, kv);
    const auto d0 = eval_basis_deriv(x, kv, 0);
    REQUIRE(b.size() == d0.size());
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(b[i] == d0[i]);
    const auto d1 = eval_basis_deriv(x, kv, 1);
    double sum = 0.0;
    for (double v : d1) sum += v;
    CHECK(std::fabs(sum) < 1e-10);
  }
}

TEST_CASE("hat function has slope +1 on its rising piece") {
  const KnotVector kv = augment_knots({0.0, 1.0, 2.0}, 1);
  const auto d1 = eval_basis_deriv(0.5, kv, 1);
  REQUIRE(d1.size() == 3);
  // basis 1 rises on [0,1]; basis 0 falls toward 1 from the left extension
  CHECK(d1[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d1[0] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("first derivative matches central differences away from knots") {
  Rng rng(23);
  const KnotVector kv = augment_knots({-1.0, -0.35, 0.2, 0.6, 1.0}, 3);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 300) {
    const double x = rng.uniform(-0.99, 0.99);
    bool near_knot = false;
    for (double t : kv.augmented)
      if (std::fabs(x - t) < 1e-3) near_knot = true;
    if (near_knot) continue;
    ++checked;
    const auto lo = eval_basis(x - h, kv);
    const auto hi = eval_basis(x + h, kv);
    const auto d1 = eval_basis_deriv(x, kv, 1);
    for (std::size_t i = 0; i < d1.size(); ++i) {
      const double fd = (hi[i] - lo[i]) / (2.0 * h);
      const double scale = std::max(1.0, std::fabs(d1[i]));
      CHECK(std::fabs(fd - d1[i]) / scale < 1e-5);
    }
  }
}

TEST_CASE("second derivative matches central differences") {
  Rng rng(29);
  const KnotVector kv = uniform_knots(-1.0, 1.0, 4, 3);
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const double x = rng.uniform(-0.9, 0.9);
    const auto lo = eval_basis(x - h, kv);
    const auto mid = eval_basis(x, kv);
    const auto hi = eval_basis(x + h, kv);
    const auto d2 = eval_basis_deriv(x, kv, 2);
    for (std::size_t i = 0; i < d2.size(); ++i) {
      const double fd = (hi[i] - 2.0 * mid[i] + lo[i]) / (h * h);
      CHECK(std::fabs(fd - d2[i]) < 1e-3 * std::max(1.0, std::fabs(d2[i])));
    }
  }
}

TEST_CASE("local support: zero outside [aug[m], aug[m+k+1]]") {
  Rng rng(31);
  const KnotVector kv = augment_knots({-1.0, -0.2, 0.1, 0.9, 1.0}, 3);
  for (int trial = 0; trial < 500; ++trial) {
    const double x = rng.uniform(-2.0, 2.0);
    const auto vals = eval_basis(x, kv);
    for (std::size_t m = 0; m < vals.size(); ++m) {
      const double lo = kv.augmented[m];
      const double hi = kv.augmented[m + kv.order_k + 1];
      if (x < lo || x > hi) CHECK(vals[m] == 0.0);
    }
  }
}

TEST_CASE("out-of-span evaluation returns natural recursion values") {
  const KnotVector kv = uniform_knots(-1.0, 1.0, 3, 3);
  const auto vals = eval_basis(1.3, kv);  // inside the augmented extension
  double sum = 0.0;
  for (double v : vals) sum += v;
  CHECK(sum > 0.0);   // some support remains
  CHECK(sum < 1.0);   // but unity no longer holds
  const auto far = eval_basis(5.0, kv);  // beyond the augmented span
  for (double v : far) CHECK(v == 0.0);
}
