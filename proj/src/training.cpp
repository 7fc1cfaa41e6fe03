#include "kan/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace kan {

void TrainConfig::validate() const {
  require(iterations >= 1, "TrainConfig: iterations must be positive");
  require(learning_rate > 0.0, "TrainConfig: learning rate must be positive");
  std::size_t prev_it = 0;
  std::size_t prev_g = 0;
  bool first = true;
  for (const GridEvent& ev : grid_schedule) {
    require(first || ev.iteration > prev_it, "TrainConfig: schedule iterations must increase");
    require(ev.iteration < iterations, "TrainConfig: schedule event beyond iteration count");
    require(first || ev.g_new >= prev_g, "TrainConfig: schedule G values must be non-decreasing");
    prev_it = ev.iteration;
    prev_g = ev.g_new;
    first = false;
  }
}

void OptimizerState::init_like(const Network& net) {
  layers.resize(net.layers.size());
  step = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerParams& p = net.layers[l];
    layers[l][0].m1.assign(p.r.v.size(), 0.0);
    layers[l][0].m2.assign(p.r.v.size(), 0.0);
    layers[l][1].m1.assign(p.c.v.size(), 0.0);
    layers[l][1].m2.assign(p.c.v.size(), 0.0);
    layers[l][2].m1.assign(p.b.size(), 0.0);
    layers[l][2].m2.assign(p.b.size(), 0.0);
  }
}

void OptimizerState::reset_b_moments(const Network& net) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l][2].m1.assign(net.layers[l].b.size(), 0.0);
    layers[l][2].m2.assign(net.layers[l].b.size(), 0.0);
  }
}

void adam_update(double* params, const double* grads, std::size_t n, OptimizerState::Moments& mo,
                 std::size_t step, double lr, double beta1, double beta2, double eps) {
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    mo.m1[i] = beta1 * mo.m1[i] + (1.0 - beta1) * g;
    mo.m2[i] = beta2 * mo.m2[i] + (1.0 - beta2) * g * g;
    const double mhat = mo.m1[i] / c1;
    const double vhat = mo.m2[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

void adam_step(Network& net, const Gradients& grads, OptimizerState& state, double lr) {
  ++state.step;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    LayerParams& p = net.layers[l];
    const LayerGrads& lg = grads.layers[l];
    adam_update(p.r.v.data(), lg.r.v.data(), p.r.v.size(), state.layers[l][0], state.step, lr,
                state.beta1, state.beta2, state.eps);
    adam_update(p.c.v.data(), lg.c.v.data(), p.c.v.size(), state.layers[l][1], state.step, lr,
                state.beta1, state.beta2, state.eps);
    adam_update(p.b.data(), lg.b.data(), p.b.size(), state.layers[l][2], state.step, lr,
                state.beta1, state.beta2, state.eps);
  }
}

LossEvaluator LossEvaluator::mse(const Mat& inputs, const Mat& targets) {
  LossEvaluator ev;
  ev.kind = LossKind::Mse;
  ev.inputs = &inputs;
  ev.targets = &targets;
  return ev;
}

LossEvaluator LossEvaluator::pinn(const Mat& collocation, const Mat& boundary,
                                  const PinnProblem& problem, double boundary_weight) {
  LossEvaluator ev;
  ev.kind = LossKind::Pinn;
  ev.collocation = &collocation;
  ev.boundary = &boundary;
  ev.problem = &problem;
  ev.boundary_weight = boundary_weight;
  return ev;
}

const Mat& LossEvaluator::adaptation_batch() const {
  return kind == LossKind::Mse ? *inputs : *collocation;
}

double mse_loss(const Network& net, const Mat& inputs, const Mat& targets) {
  require(inputs.cols == targets.cols, "mse_loss: sample count mismatch");
  Mat y = network_eval(net, inputs);
  require(y.rows == targets.rows, "mse_loss: target width mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < y.rows; ++j) {
    const double* yj = y.row(j);
    const double* tj = targets.row(j);
    for (std::size_t s = 0; s < y.cols; ++s) {
      const double e = yj[s] - tj[s];
      acc += e * e;
    }
  }
  return acc / (static_cast<double>(y.rows) * static_cast<double>(y.cols));
}

double pinn_loss_terms(const double* u, const double* u_xx, const double* u_yy, const double* f,
                       double k, std::size_t n_colloc, const double* u_boundary,
                       std::size_t n_boundary, double boundary_weight, double* residual_term,
                       double* boundary_term) {
  const double k2 = k * k;
  double racc = 0.0;
  for (std::size_t s = 0; s < n_colloc; ++s) {
    const double res = u_xx[s] + u_yy[s] + k2 * u[s] - f[s];
    racc += res * res;
  }
  racc /= static_cast<double>(n_colloc);
  double bacc = 0.0;
  for (std::size_t s = 0; s < n_boundary; ++s) bacc += u_boundary[s] * u_boundary[s];
  if (n_boundary > 0) bacc /= static_cast<double>(n_boundary);
  if (residual_term) *residual_term = racc;
  if (boundary_term) *boundary_term = bacc;
  return racc + boundary_weight * bacc;
}

namespace {

struct PinnFields {
  ForwardCache fc;
  EdgePhi ep;
  JetState jx, jy;
  Mat boundary_y;
  std::vector<double> forcing;
  std::vector<double> residual;
};

void pinn_forward(const Network& net, const Mat& colloc, const Mat& boundary,
                  const PinnProblem& prob, int depth, PinnFields& pf) {
  require(net.n_inputs() == 2 && net.n_outputs() == 1,
          "pinn: network must map 2 inputs to 1 output");
  network_forward_batch(net, colloc, depth, pf.fc);
  build_edge_phi(net, pf.fc, pf.ep);
  jet_forward_batch(net, pf.fc, pf.ep, 0, pf.jx);
  jet_forward_batch(net, pf.fc, pf.ep, 1, pf.jy);
  pf.boundary_y = network_eval(net, boundary);

  const std::size_t nc = colloc.cols;
  pf.forcing.resize(nc);
  for (std::size_t s = 0; s < nc; ++s)
    pf.forcing[s] = prob.forcing(colloc.at(0, s), colloc.at(1, s));

  const double k2 = prob.k * prob.k;
  pf.residual.resize(nc);
  const double* u = pf.fc.y.row(0);
  const double* uxx = pf.jx.w.back().row(0);
  const double* uyy = pf.jy.w.back().row(0);
  for (std::size_t s = 0; s < nc; ++s)
    pf.residual[s] = uxx[s] + uyy[s] + k2 * u[s] - pf.forcing[s];
}

}  // namespace

double pinn_loss(const Network& net, const Mat& collocation, const Mat& boundary,
                 const PinnProblem& problem, double boundary_weight) {
  PinnFields pf;
  pinn_forward(net, collocation, boundary, problem, 2, pf);
  return pinn_loss_terms(pf.fc.y.row(0), pf.jx.w.back().row(0), pf.jy.w.back().row(0),
                         pf.forcing.data(), problem.k, collocation.cols, pf.boundary_y.row(0),
                         boundary.cols, boundary_weight);
}

double param_gradients(const Network& net, const LossEvaluator& loss, Gradients& grads) {
  grads.zero();
  if (loss.kind == LossKind::Mse) {
    const Mat& x = *loss.inputs;
    const Mat& t = *loss.targets;
    require(x.cols == t.cols, "param_gradients: sample count mismatch");
    ForwardCache fc;
    network_forward_batch(net, x, 1, fc);
    require(fc.y.rows == t.rows, "param_gradients: target width mismatch");

    const double denom = static_cast<double>(fc.y.rows) * static_cast<double>(fc.y.cols);
    Mat gy(fc.y.rows, fc.y.cols);
    double acc = 0.0;
    for (std::size_t j = 0; j < fc.y.rows; ++j) {
      const double* yj = fc.y.row(j);
      const double* tj = t.row(j);
      double* gj = gy.row(j);
      for (std::size_t s = 0; s < fc.y.cols; ++s) {
        const double e = yj[s] - tj[s];
        acc += e * e;
        gj[s] = 2.0 * e / denom;
      }
    }
    const double value = acc / denom;
    if (!std::isfinite(value)) throw NonFiniteLoss("param_gradients: non-finite MSE loss");
    backward_batch(net, fc, gy, grads);
    return value;
  }

  const Mat& colloc = *loss.collocation;
  const Mat& boundary = *loss.boundary;
  PinnFields pf;
  pinn_forward(net, colloc, boundary, *loss.problem, 3, pf);
  double residual_term = 0.0, boundary_term = 0.0;
  const double value = pinn_loss_terms(
      pf.fc.y.row(0), pf.jx.w.back().row(0), pf.jy.w.back().row(0), pf.forcing.data(),
      loss.problem->k, colloc.cols, pf.boundary_y.row(0), boundary.cols, loss.boundary_weight,
      &residual_term, &boundary_term);
  if (!std::isfinite(value)) throw NonFiniteLoss("param_gradients: non-finite PINN loss");

  const std::size_t nc = colloc.cols;
  const double k2 = loss.problem->k * loss.problem->k;
  Mat gy(1, nc), gv(1, nc), gz(1, nc);
  for (std::size_t s = 0; s < nc; ++s) {
    const double gres = 2.0 * pf.residual[s] / static_cast<double>(nc);
    gy.at(0, s) = gres * k2;
    gz.at(0, s) = gres;
  }
  jet_backward_batch(net, pf.fc, pf.ep, pf.jx, gy, gv, gz, grads);
  gy.zero();
  jet_backward_batch(net, pf.fc, pf.ep, pf.jy, gy, gv, gz, grads);

  // boundary term through a plain pass
  ForwardCache fb;
  network_forward_batch(net, boundary, 1, fb);
  Mat gb(1, boundary.cols);
  for (std::size_t s = 0; s < boundary.cols; ++s)
    gb.at(0, s) =
        loss.boundary_weight * 2.0 * fb.y.at(0, s) / static_cast<double>(boundary.cols);
  backward_batch(net, fb, gb, grads);
  return value;
}

TrainResult train(Network net, const LossEvaluator& loss, const TrainConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed_ms = [&t0]() {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  OptimizerState state;
  state.init_like(net);
  Gradients grads;
  grads.init_like(net);

  TrainResult result;
  result.trace.reserve(config.iterations);
  std::size_t next_event = 0;

  for (std::size_t it = 0; it < config.iterations; ++it) {
    while (next_event < config.grid_schedule.size() &&
           config.grid_schedule[next_event].iteration == it) {
      adapt_network(net, loss.adaptation_batch(), config.strategy,
                    config.grid_schedule[next_event].g_new);
      state.reset_b_moments(net);
      grads.init_like(net);
      ++next_event;
    }

    double value = 0.0;
    try {
      value = param_gradients(net, loss, grads);
    } catch (const NonFiniteLoss&) {
      result.diverged = true;
      result.diverged_at = it;
      break;
    }
    adam_step(net, grads, state, config.learning_rate);
    result.trace.push_back({it, value, net.layers[0].knots[0].grid_intervals(), elapsed_ms()});
  }

  result.net = std::move(net);
  result.final_loss = result.trace.empty() ? 0.0 : result.trace.back().loss;
  result.wall_ms = elapsed_ms();
  return result;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  require(out.good(), "write_trace_csv: cannot open " + path);
  out << "iteration,loss,grid_G,wall_clock_ms\n";
  out.precision(17);
  for (const TraceRow& row : trace)
    out << row.iteration << ',' << row.loss << ',' << row.grid_g << ',' << row.wall_ms << '\n';
  require(out.good(), "write_trace_csv: write failed");
}

}  // namespace kan
