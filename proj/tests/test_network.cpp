#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kan/network.hpp"

using namespace kan;

namespace {

Network random_net(const std::vector<std::size_t>& widths, std::size_t g, std::uint64_t seed) {
  return init_network(widths, g, 3, seed);
}

}  // namespace

TEST_CASE("silu values and jet at the origin") {
  CHECK(silu(0.0) == 0.0);
  CHECK(std::fabs(silu(50.0) - 50.0) < 1e-12);
  CHECK(silu(-50.0) == doctest::Approx(0.0).epsilon(1e-12));
  const Jet2 j = silu_jet({0.0, 1.0, 0.0});
  CHECK(j.value == 0.0);
  CHECK(j.d1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(j.d2 == doctest::Approx(0.5).epsilon(1e-15));
  // zero-seed direction stays flat
  const Jet2 flat = silu_jet({0.7, 0.0, 0.0});
  CHECK(flat.d1 == 0.0);
  CHECK(flat.d2 == 0.0);
}

TEST_CASE("silu derivatives match finite differences") {
  const double h = 1e-5;
  for (double x : {-3.0, -0.4, 0.0, 0.9, 2.5}) {
    const double fd1 = (silu(x + h) - silu(x - h)) / (2.0 * h);
    CHECK(std::fabs(fd1 - silu_deriv(x, 1)) < 1e-8);
    const double fd2 = (silu(x + h) - 2.0 * silu(x) + silu(x - h)) / (h * h);
    CHECK(std::fabs(fd2 - silu_deriv(x, 2)) < 1e-5);
    const double fd3 = (silu_deriv(x + h, 2) - silu_deriv(x - h, 2)) / (2.0 * h);
    CHECK(std::fabs(fd3 - silu_deriv(x, 3)) < 1e-5);
  }
}

TEST_CASE("init_layer: ones scaling weights, determinism, variance") {
  const LayerParams p = init_layer(4, 3, 5, 3, 42);
  for (double v : p.c.v) CHECK(v == 1.0);
  CHECK(p.basis_count() == 8);
  CHECK(p.knots[0].span_lo() == -1.0);
  CHECK(p.knots[0].span_hi() == 1.0);

  const LayerParams q = init_layer(4, 3, 5, 3, 42);
  CHECK(p.r.v == q.r.v);
  CHECK(p.b == q.b);

  // 100x100 edges, G+k = 15: empirical variance of b within 20% of target
  const LayerParams big = init_layer(100, 100, 12, 3, 7);
  REQUIRE(big.b.size() == 150000);
  double mean = 0.0;
  for (double v : big.b) mean += v;
  mean /= static_cast<double>(big.b.size());
  double var = 0.0;
  for (double v : big.b) var += (v - mean) * (v - mean);
  var /= static_cast<double>(big.b.size());
  const double target = 2.0 / (200.0 * 15.0);
  CHECK(var > 0.8 * target);
  CHECK(var < 1.2 * target);
}

TEST_CASE("layer_forward special cases") {
  SUBCASE("zero weights give zero output") {
    LayerParams p = init_layer(3, 2, 4, 3, 1);
    p.r.zero();
    std::fill(p.b.begin(), p.b.end(), 0.0);
    const auto y = layer_forward(p, std::vector<double>{0.3, -0.8, 0.5});
    for (double v : y) CHECK(v == 0.0);
  }
  SUBCASE("residual-only path is silu") {
    LayerParams p = init_layer(1, 1, 4, 3, 2);
    p.r.at(0, 0) = 1.0;
    p.c.at(0, 0) = 0.0;
    std::fill(p.b.begin(), p.b.end(), 0.0);
    for (double x : {-1.5, -0.2, 0.0, 0.7, 2.0})
      CHECK(layer_forward(p, std::vector<double>{x})[0] ==
            doctest::Approx(silu(x)).epsilon(1e-14));
  }
  SUBCASE("one-hot spline coefficient picks a single basis function") {
    LayerParams p = init_layer(1, 1, 4, 3, 3);
    p.r.at(0, 0) = 0.0;
    p.c.at(0, 0) = 1.0;
    std::fill(p.b.begin(), p.b.end(), 0.0);
    const std::size_t mstar = 3;
    p.b_edge(0, 0)[mstar] = 1.0;
    for (double x : {-0.9, -0.1, 0.33, 0.8}) {
      const auto basis = eval_basis(x, p.knots[0]);
      CHECK(layer_forward(p, std::vector<double>{x})[0] ==
            doctest::Approx(basis[mstar]).epsilon(1e-14));
    }
  }
}

TEST_CASE("network_forward composition and capture") {
  const Network net = random_net({2, 3, 1}, 4, 5);
  Mat batch(2, 7);
  Rng rng(6);
  for (double& v : batch.v) v = rng.uniform(-1.0, 1.0);

  std::vector<Mat> captures;
  const Mat y = network_forward_capture(net, batch, &captures);
  REQUIRE(captures.size() == 2);
  CHECK(captures[0].v == batch.v);

  // captured inputs of layer 1 equal layer 0 applied to the batch
  Network first_only;
  first_only.widths = {2, 3};
  first_only.order_k = 3;
  first_only.layers.push_back(net.layers[0]);
  const Mat mid = network_eval(first_only, batch);
  CHECK(captures[1].v == mid.v);

  // single layer network equals layer_forward
  for (std::size_t s = 0; s < batch.cols; ++s) {
    const std::vector<double> x = {batch.at(0, s), batch.at(1, s)};
    const auto via_layer = layer_forward(net.layers[0], x);
    for (std::size_t j = 0; j < via_layer.size(); ++j)
      CHECK(via_layer[j] == mid.at(j, s));
  }
  CHECK(y.rows == 1);
}

TEST_CASE("forward is independent of batch order") {
  const Network net = random_net({3, 4, 2}, 5, 8);
  Mat batch(3, 9);
  Rng rng(9);
  for (double& v : batch.v) v = rng.uniform(-1.2, 1.2);
  const Mat y = network_eval(net, batch);

  Mat reversed(3, 9);
  for (std::size_t s = 0; s < 9; ++s)
    for (std::size_t i = 0; i < 3; ++i) reversed.at(i, s) = batch.at(i, 8 - s);
  const Mat yr = network_eval(net, reversed);
  for (std::size_t s = 0; s < 9; ++s)
    for (std::size_t j = 0; j < 2; ++j) CHECK(y.at(j, s) == yr.at(j, 8 - s));
}

TEST_CASE("spline contribution is linear in b") {
  Network net = random_net({2, 2}, 4, 10);
  net.layers[0].r.zero();
  const std::vector<double> x = {0.4, -0.6};
  const auto y1 = network_forward(net, x);
  for (double& v : net.layers[0].b) v *= 2.0;
  const auto y2 = network_forward(net, x);
  for (std::size_t j = 0; j < y1.size(); ++j)
    CHECK(y2[j] == doctest::Approx(2.0 * y1[j]).epsilon(1e-14));
}

TEST_CASE("jet of a residual-only unit equals the silu jet") {
  Network net;
  net.widths = {1, 1};
  net.order_k = 3;
  LayerParams p = init_layer(1, 1, 4, 3, 11);
  p.r.at(0, 0) = 1.0;
  p.c.at(0, 0) = 0.0;
  std::fill(p.b.begin(), p.b.end(), 0.0);
  net.layers.push_back(std::move(p));

  const auto jets = jet_forward(net, std::vector<double>{0.0}, 0);
  REQUIRE(jets.size() == 1);
  CHECK(jets[0].value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(jets[0].d1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(jets[0].d2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("edges seeded with a flat direction contribute nothing") {
  // only edges from input 1 are active; the jet along axis 0 must stay zero
  Network net;
  net.widths = {2, 2};
  net.order_k = 3;
  LayerParams p = init_layer(2, 2, 4, 3, 12);
  for (std::size_t j = 0; j < 2; ++j) {
    p.r.at(j, 0) = 0.0;
    p.c.at(j, 0) = 0.0;
    std::fill(p.b_edge(j, 0), p.b_edge(j, 0) + p.basis_count(), 0.0);
  }
  net.layers.push_back(std::move(p));
  const auto jets = jet_forward(net, std::vector<double>{0.3, -0.4}, 0);
  for (const Jet2& j : jets) {
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
  }
}

TEST_CASE("jet value channel equals the forward pass and derivatives match FD") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Network net = random_net({2, 4, 3, 1}, 4, 100 + trial);
    for (int pt = 0; pt < 6; ++pt) {
      const std::vector<double> x = {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
      for (std::size_t axis = 0; axis < 2; ++axis) {
        const auto jets = jet_forward(net, x, axis);
        const auto fwd = network_forward(net, x);
        const auto fd = jet_forward_fd(net, x, axis, 1e-4);
        const auto fd2 = jet_forward_fd(net, x, axis, 1e-3);
        for (std::size_t j = 0; j < jets.size(); ++j) {
          CHECK(jets[j].value == fwd[j]);  // same code path, bit-identical
          const double s1 = std::max(1.0, std::fabs(jets[j].d1));
          CHECK(std::fabs(jets[j].d1 - fd[j].d1) / s1 < 1e-4);
          const double s2 = std::max(1.0, std::fabs(jets[j].d2));
          CHECK(std::fabs(jets[j].d2 - fd2[j].d2) / s2 < 1e-4);
        }
      }
    }
  }
}

TEST_CASE("checkpoint round trip preserves parameters and outputs") {
  const Network net = random_net({2, 5, 1}, 6, 77);
  const std::string path =
      (std::filesystem::temp_directory_path() / "kan_ckpt_test.json").string();
  save_network(net, path);
  const Network back = load_network(path);
  CHECK(back.widths == net.widths);
  CHECK(back.order_k == net.order_k);
  REQUIRE(back.layers.size() == net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(back.layers[l].r.v == net.layers[l].r.v);
    CHECK(back.layers[l].c.v == net.layers[l].c.v);
    CHECK(back.layers[l].b == net.layers[l].b);
    for (std::size_t i = 0; i < net.layers[l].n_in; ++i)
      CHECK(back.layers[l].knots[i].augmented == net.layers[l].knots[i].augmented);
  }
  const std::vector<double> x = {0.25, -0.5};
  CHECK(network_forward(back, x) == network_forward(net, x));
  std::filesystem::remove(path);
}

TEST_CASE("missing version field is rejected") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "kan_ckpt_bad.json").string();
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"widths\": [1, 1]}", f);
    std::fclose(f);
  }
  CHECK_THROWS(load_network(path));
  fs::remove(path);
}
