#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "kan/benchmarks.hpp"
#include "kan/training.hpp"

using namespace kan;

namespace {

struct ParamRef {
  double* ptr;
  std::size_t layer;
};

std::vector<ParamRef> all_params(Network& net) {
  std::vector<ParamRef> refs;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    LayerParams& p = net.layers[l];
    for (double& v : p.r.v) refs.push_back({&v, l});
    for (double& v : p.c.v) refs.push_back({&v, l});
    for (double& v : p.b) refs.push_back({&v, l});
  }
  return refs;
}

std::vector<double> flat_grads(const Gradients& g) {
  std::vector<double> out;
  for (const LayerGrads& lg : g.layers) {
    out.insert(out.end(), lg.r.v.begin(), lg.r.v.end());
    out.insert(out.end(), lg.c.v.begin(), lg.c.v.end());
    out.insert(out.end(), lg.b.begin(), lg.b.end());
  }
  return out;
}

double eval_loss(const Network& net, const LossEvaluator& ev) {
  if (ev.kind == LossKind::Mse) return mse_loss(net, *ev.inputs, *ev.targets);
  return pinn_loss(net, *ev.collocation, *ev.boundary, *ev.problem, ev.boundary_weight);
}

void check_gradients(Network net, const LossEvaluator& ev, double step, double rel_tol) {
  Gradients grads;
  grads.init_like(net);
  param_gradients(net, ev, grads);
  const std::vector<double> analytic = flat_grads(grads);
  const std::vector<ParamRef> refs = all_params(net);
  REQUIRE(analytic.size() == refs.size());

  double gmax = 0.0;
  for (double g : analytic) gmax = std::max(gmax, std::fabs(g));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const double saved = *refs[i].ptr;
    *refs[i].ptr = saved + step;
    const double hi = eval_loss(net, ev);
    *refs[i].ptr = saved - step;
    const double lo = eval_loss(net, ev);
    *refs[i].ptr = saved;
    const double fd = (hi - lo) / (2.0 * step);
    const double scale = std::max({1e-6, std::fabs(fd), std::fabs(analytic[i]), 1e-3 * gmax});
    CHECK(std::fabs(fd - analytic[i]) / scale < rel_tol);
  }
}

}  // namespace

TEST_CASE("MSE gradients match central finite differences") {
  Rng rng(71);
  for (int trial = 0; trial < 3; ++trial) {
    Network net = init_network({2, 3, 2}, 3, 3, 700 + trial);
    Mat x(2, 6), t(2, 6);
    for (double& v : x.v) v = rng.uniform(-0.9, 0.9);
    for (double& v : t.v) v = rng.uniform(-1.0, 1.0);
    check_gradients(std::move(net), LossEvaluator::mse(x, t), 1e-5, 1e-5);
  }
}

TEST_CASE("PINN gradients match central finite differences") {
  Rng rng(72);
  HelmholtzProblem hp = helmholtz_problem(1, 1, 3, 4);
  const PinnProblem prob = hp.pinn();
  for (int trial = 0; trial < 2; ++trial) {
    Network net = init_network({2, 3, 1}, 3, 3, 800 + trial);
    check_gradients(std::move(net),
                    LossEvaluator::pinn(hp.collocation, hp.boundary, prob, 0.7), 1e-5, 1e-4);
  }
}

TEST_CASE("duplicated batch rows do not change the gradient") {
  Network net = init_network({1, 3, 1}, 3, 3, 73);
  Mat x1(1, 1), t1(1, 1);
  x1.at(0, 0) = 0.4;
  t1.at(0, 0) = -0.2;
  Mat x3(1, 3), t3(1, 3);
  for (int s = 0; s < 3; ++s) {
    x3.at(0, s) = 0.4;
    t3.at(0, s) = -0.2;
  }
  Gradients g1, g3;
  g1.init_like(net);
  g3.init_like(net);
  param_gradients(net, LossEvaluator::mse(x1, t1), g1);
  param_gradients(net, LossEvaluator::mse(x3, t3), g3);
  const auto f1 = flat_grads(g1);
  const auto f3 = flat_grads(g3);
  for (std::size_t i = 0; i < f1.size(); ++i)
    CHECK(f1[i] == doctest::Approx(f3[i]).epsilon(1e-12));
}

TEST_CASE("target scaling scales the spline-path gradient linearly") {
  // single edge, residual off: loss gradient in b is linear in the target
  Network net;
  net.widths = {1, 1};
  net.order_k = 3;
  LayerParams p = init_layer(1, 1, 3, 3, 74);
  p.r.at(0, 0) = 0.0;
  std::fill(p.b.begin(), p.b.end(), 0.0);
  net.layers.push_back(std::move(p));

  Mat x(1, 4), t(1, 4), t2(1, 4);
  Rng rng(75);
  for (int s = 0; s < 4; ++s) {
    x.at(0, s) = rng.uniform(-0.9, 0.9);
    t.at(0, s) = rng.uniform(0.1, 1.0);
    t2.at(0, s) = 2.0 * t.at(0, s);
  }
  Gradients ga, gb;
  ga.init_like(net);
  gb.init_like(net);
  param_gradients(net, LossEvaluator::mse(x, t), ga);
  param_gradients(net, LossEvaluator::mse(x, t2), gb);
  for (std::size_t m = 0; m < net.layers[0].b.size(); ++m)
    CHECK(gb.layers[0].b[m] == doctest::Approx(2.0 * ga.layers[0].b[m]).epsilon(1e-12));
}

TEST_CASE("adam behaviour") {
  SUBCASE("zero gradients leave parameters unchanged") {
    Network net = init_network({1, 2, 1}, 3, 3, 76);
    const Network before = net;
    OptimizerState st;
    st.init_like(net);
    Gradients g;
    g.init_like(net);
    for (int it = 0; it < 5; ++it) adam_step(net, g, st, 1e-2);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      CHECK(net.layers[l].r.v == before.layers[l].r.v);
      CHECK(net.layers[l].b == before.layers[l].b);
    }
  }
  SUBCASE("first step has near-unit bias-corrected magnitude") {
    std::vector<double> p = {1.0, -2.0};
    const std::vector<double> g = {0.3, -4.0};
    OptimizerState::Moments mo;
    mo.m1.assign(2, 0.0);
    mo.m2.assign(2, 0.0);
    adam_update(p.data(), g.data(), 2, mo, 1, 1e-2, 0.9, 0.999, 1e-8);
    CHECK(std::fabs(std::fabs(1.0 - p[0]) - 1e-2) < 1e-6);
    CHECK(std::fabs(std::fabs(-2.0 - p[1]) - 1e-2) < 1e-6);
  }
  SUBCASE("identical tensors receive identical updates") {
    std::vector<double> pa = {0.5, 0.5}, pb = {0.5, 0.5};
    const std::vector<double> g = {1.23, 1.23};
    OptimizerState::Moments ma, mb;
    ma.m1.assign(2, 0.0);
    ma.m2.assign(2, 0.0);
    mb = ma;
    adam_update(pa.data(), g.data(), 2, ma, 1, 3e-3, 0.9, 0.999, 1e-8);
    adam_update(pb.data(), g.data(), 2, mb, 1, 3e-3, 0.9, 0.999, 1e-8);
    CHECK(pa == pb);
    CHECK(pa[0] == pa[1]);
  }
}

TEST_CASE("mse_loss conventions") {
  Network net;
  net.widths = {1, 2};
  net.order_k = 3;
  LayerParams p = init_layer(1, 2, 3, 3, 77);
  p.r.zero();
  std::fill(p.b.begin(), p.b.end(), 0.0);
  net.layers.push_back(std::move(p));  // constant-zero predictor

  Mat x(1, 1);
  x.at(0, 0) = 0.3;
  SUBCASE("mean over output dimensions") {
    Mat t(2, 1);
    t.at(0, 0) = 1.0;
    t.at(1, 0) = 3.0;
    CHECK(mse_loss(net, x, t) == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("constant offset") {
    Mat xs(1, 5), ts(2, 5);
    for (int s = 0; s < 5; ++s) {
      xs.at(0, s) = 0.1 * s;
      ts.at(0, s) = 2.0;
      ts.at(1, s) = 2.0;
    }
    CHECK(mse_loss(net, xs, ts) == doctest::Approx(4.0).epsilon(1e-15));
  }
  SUBCASE("perfect prediction") {
    Mat t(2, 1);
    t.at(0, 0) = 0.0;
    t.at(1, 0) = 0.0;
    CHECK(mse_loss(net, x, t) == 0.0);
  }
}

TEST_CASE("pinn_loss analytic oracles") {
  HelmholtzProblem hp = helmholtz_problem(1, 1, 64, 64);
  const PinnProblem prob = hp.pinn();
  const std::size_t nc = hp.collocation.cols;
  const std::size_t nb = hp.boundary.cols;

  SUBCASE("exact solution gives vanishing loss terms") {
    std::vector<double> u(nc), uxx(nc), uyy(nc), f(nc), ub(nb);
    for (std::size_t s = 0; s < nc; ++s) {
      const double x = hp.collocation.at(0, s), y = hp.collocation.at(1, s);
      u[s] = hp.u_true(x, y);
      uxx[s] = -M_PI * M_PI * u[s];
      uyy[s] = -M_PI * M_PI * u[s];
      f[s] = hp.forcing(x, y);
    }
    for (std::size_t s = 0; s < nb; ++s)
      ub[s] = hp.u_true(hp.boundary.at(0, s), hp.boundary.at(1, s));
    const double loss = pinn_loss_terms(u.data(), uxx.data(), uyy.data(), f.data(), prob.k, nc,
                                        ub.data(), nb, 1.0);
    CHECK(loss < 1e-10);
  }

  SUBCASE("zero network leaves the pure forcing residual") {
    Network net = init_network({2, 3, 1}, 3, 3, 78);
    for (LayerParams& p : net.layers) {
      p.r.zero();
      std::fill(p.b.begin(), p.b.end(), 0.0);
    }
    const double loss = pinn_loss(net, hp.collocation, hp.boundary, prob, 1.0);
    // cell-centred grid averages sin^2 exactly to 1/2 per axis
    const double expected = std::pow(1.0 - 2.0 * M_PI * M_PI, 2) / 4.0;
    CHECK(loss == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("zero boundary weight leaves the residual term") {
    Network net = init_network({2, 3, 1}, 3, 3, 79);
    const double with = pinn_loss(net, hp.collocation, hp.boundary, prob, 1.0);
    const double without = pinn_loss(net, hp.collocation, hp.boundary, prob, 0.0);
    // difference is exactly the boundary mean square
    Mat ub = network_eval(net, hp.boundary);
    double bacc = 0.0;
    for (std::size_t s = 0; s < nb; ++s) bacc += ub.at(0, s) * ub.at(0, s);
    bacc /= static_cast<double>(nb);
    CHECK(with - without == doctest::Approx(bacc).epsilon(1e-12));
  }
}

TEST_CASE("train: static grid improves the loss and is deterministic") {
  RegressionTask task = gaussian_bump_task();
  task.n_train = 200;
  const Dataset data = sample_training(task, 0);
  TrainConfig tc;
  tc.iterations = 150;
  tc.learning_rate = 1e-2;
  tc.loss_kind = LossKind::Mse;

  const LossEvaluator ev = LossEvaluator::mse(data.x, data.y);
  TrainResult a = train(init_network({1, 5, 1}, 3, 3, 900), ev, tc);
  CHECK_FALSE(a.diverged);
  REQUIRE(a.trace.size() == 150);
  CHECK(a.trace.back().loss < a.trace.front().loss);
  for (const TraceRow& row : a.trace) CHECK(row.grid_g == 3);

  TrainResult b = train(init_network({1, 5, 1}, 3, 3, 900), ev, tc);
  REQUIRE(b.trace.size() == a.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].loss == b.trace[i].loss);
    CHECK(a.trace[i].grid_g == b.trace[i].grid_g);
  }
}

TEST_CASE("train: scheduled extension switches G and stays continuous") {
  RegressionTask task = gaussian_bump_task();
  task.n_train = 300;
  const Dataset data = sample_training(task, 1);
  TrainConfig tc;
  tc.iterations = 120;
  tc.learning_rate = 1e-2;
  tc.grid_schedule = {{80, 6}};
  const LossEvaluator ev = LossEvaluator::mse(data.x, data.y);

  TrainResult r = train(init_network({1, 5, 1}, 3, 3, 901), ev, tc);
  CHECK_FALSE(r.diverged);
  CHECK(r.trace[79].grid_g == 3);
  CHECK(r.trace[80].grid_g == 6);

  // the grid change must not teleport the model: bound the loss jump by the
  // refit tolerance (1e-3 relative output RMS)
  const double pre = r.trace[79].loss;
  const double post = r.trace[80].loss;
  double yrms = 0.0;
  for (std::size_t s = 0; s < data.y.cols; ++s) yrms += data.y.at(0, s) * data.y.at(0, s);
  yrms = std::sqrt(yrms / static_cast<double>(data.y.cols));
  const double delta = 1e-3 * std::max(1.0, yrms);
  const double bound = 10.0 * (2.0 * std::sqrt(pre) * delta + delta * delta);
  CHECK(std::fabs(post - pre) <= bound);
}

TEST_CASE("train: schedule validation") {
  TrainConfig tc;
  tc.iterations = 100;
  tc.grid_schedule = {{50, 6}, {40, 9}};
  CHECK_THROWS(tc.validate());
  tc.grid_schedule = {{50, 6}, {60, 5}};
  CHECK_THROWS(tc.validate());
  tc.grid_schedule = {{50, 6}, {120, 9}};
  CHECK_THROWS(tc.validate());
  tc.grid_schedule = {{50, 6}, {60, 9}};
  CHECK_NOTHROW(tc.validate());
}

TEST_CASE("train: divergence aborts with the trace attached") {
  RegressionTask task = gaussian_bump_task();
  task.n_train = 64;
  const Dataset data = sample_training(task, 2);
  TrainConfig tc;
  tc.iterations = 50;
  tc.learning_rate = 1e12;  // guaranteed blow-up
  const LossEvaluator ev = LossEvaluator::mse(data.x, data.y);
  Network net = init_network({1, 4, 1}, 3, 3, 902);
  net.layers[0].r.at(0, 0) = 1e160;  // overflow on the first evaluation

  const TrainResult r = train(std::move(net), ev, tc);
  CHECK(r.diverged);
  CHECK(r.diverged_at == 0);
}

TEST_CASE("trace CSV carries the expected columns") {
  namespace fs = std::filesystem;
  const std::vector<TraceRow> trace = {{0, 0.5, 3, 1.25}, {1, 0.25, 6, 2.5}};
  const std::string path = (fs::temp_directory_path() / "kan_trace_test.csv").string();
  write_trace_csv(path, trace);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,loss,grid_G,wall_clock_ms");
  std::string row;
  std::getline(in, row);
  CHECK(row.rfind("0,0.5,3,", 0) == 0);
  fs::remove(path);
}
