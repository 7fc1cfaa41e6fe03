#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kan/adaptation.hpp"
#include "kan/network.hpp"

namespace kan {

enum class LossKind { Mse, Pinn };

struct GridEvent {
  std::size_t iteration;
  std::size_t g_new;
};

struct TrainConfig {
  std::size_t iterations = 0;
  double learning_rate = 1e-3;
  std::vector<GridEvent> grid_schedule;  // strictly increasing, < iterations, G non-decreasing
  AdaptationStrategy strategy;
  std::uint64_t seed = 0;
  LossKind loss_kind = LossKind::Mse;
  double boundary_weight = 1.0;  // PINN only

  void validate() const;
};

struct OptimizerState {
  struct Moments {
    std::vector<double> m1, m2;
  };
  std::vector<std::array<Moments, 3>> layers;  // per layer: r, c, b
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init_like(const Network& net);
  /// Grid extension reshapes b; its moments restart at zero while r and c
  /// moments (and the step counter) carry over.
  void reset_b_moments(const Network& net);
};

/// One bias-corrected Adam update of a flat tensor.
void adam_update(double* params, const double* grads, std::size_t n, OptimizerState::Moments& mo,
                 std::size_t step, double lr, double beta1, double beta2, double eps);

void adam_step(Network& net, const Gradients& grads, OptimizerState& state, double lr);

struct PinnProblem {
  std::function<double(double, double)> forcing;
  double k = 1.0;
};

/// What the training loop differentiates: either (inputs, targets) for MSE or
/// (collocation, boundary, problem) for the physics-informed loss.
struct LossEvaluator {
  LossKind kind = LossKind::Mse;
  const Mat* inputs = nullptr;
  const Mat* targets = nullptr;
  const Mat* collocation = nullptr;
  const Mat* boundary = nullptr;
  const PinnProblem* problem = nullptr;
  double boundary_weight = 1.0;

  static LossEvaluator mse(const Mat& inputs, const Mat& targets);
  static LossEvaluator pinn(const Mat& collocation, const Mat& boundary,
                            const PinnProblem& problem, double boundary_weight);
  const Mat& adaptation_batch() const;
};

double mse_loss(const Network& net, const Mat& inputs, const Mat& targets);
double pinn_loss(const Network& net, const Mat& collocation, const Mat& boundary,
                 const PinnProblem& problem, double boundary_weight);

/// PDE-residual + boundary terms from already-evaluated fields; the network
/// path and analytic oracles share this.
double pinn_loss_terms(const double* u, const double* u_xx, const double* u_yy, const double* f,
                       double k, std::size_t n_colloc, const double* u_boundary,
                       std::size_t n_boundary, double boundary_weight,
                       double* residual_term = nullptr, double* boundary_term = nullptr);

struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reverse-accumulation gradients of the evaluator's loss for all r, c, b.
/// Returns the loss value. Throws NonFiniteLoss on a non-finite loss.
double param_gradients(const Network& net, const LossEvaluator& loss, Gradients& grads);

struct TraceRow {
  std::size_t iteration;
  double loss;
  std::size_t grid_g;
  double wall_ms;
};

struct TrainResult {
  Network net;
  std::vector<TraceRow> trace;
  bool diverged = false;
  std::size_t diverged_at = 0;
  double final_loss = 0.0;
  double wall_ms = 0.0;
};

/// Full-batch loop; scheduled grid events run adapt_network before that
/// iteration's gradient step. Deterministic given seed and config.
TrainResult train(Network net, const LossEvaluator& loss, const TrainConfig& config);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

}  // namespace kan
