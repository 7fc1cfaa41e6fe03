#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kan/common.hpp"
#include "kan/splines.hpp"

namespace kan {

/// One KAN layer: every edge (j, i) carries r_ji * silu(x_i) plus a spline
/// c_ji * sum_m b_jim * B_m(x_i) built on the i-th input's knot vector.
struct LayerParams {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  int order_k = 3;
  std::vector<KnotVector> knots;  // one per input dimension
  Mat r;                          // n_out x n_in residual weights
  Mat c;                          // n_out x n_in scaling weights (init 1.0)
  std::vector<double> b;          // n_out x n_in x (G+k) spline coefficients

  std::size_t basis_count() const { return knots.empty() ? 0 : knots[0].basis_count(); }
  double* b_edge(std::size_t j, std::size_t i) {
    return b.data() + (j * n_in + i) * basis_count();
  }
  const double* b_edge(std::size_t j, std::size_t i) const {
    return b.data() + (j * n_in + i) * basis_count();
  }
};

struct Network {
  std::vector<std::size_t> widths;
  int order_k = 3;
  std::vector<LayerParams> layers;

  std::size_t n_inputs() const { return widths.front(); }
  std::size_t n_outputs() const { return widths.back(); }
};

/// Order-2 directional Taylor triple along one input coordinate.
struct Jet2 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

double silu(double x);
double silu_deriv(double x, int order);  // order in [0, 3]
Jet2 silu_jet(const Jet2& in);

LayerParams init_layer(std::size_t n_in, std::size_t n_out, std::size_t grid_intervals,
                       int order_k, std::uint64_t seed);
Network init_network(const std::vector<std::size_t>& widths, std::size_t grid_intervals,
                     int order_k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Batched engine. Activations are feature-major (features x samples).
// `depth` is the highest basis/silu derivative order cached alongside the
// forward values: 0 plain evaluation, 1 reverse pass, 2 jet forward, 3 jet
// reverse.
// ---------------------------------------------------------------------------

struct LayerCache {
  Mat x;                                  // n_in x N layer inputs
  std::array<Mat, 4> silu;                // n_in x N rows per derivative order
  std::vector<std::array<Mat, 4>> basis;  // per input dim: (G+k) x N per order
  int depth = -1;
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Mat y;  // n_out x N network outputs
};

void network_forward_batch(const Network& net, const Mat& inputs, int depth, ForwardCache& fc);

/// Plain evaluation (depth 0), no cache kept by the caller.
Mat network_eval(const Network& net, const Mat& inputs);

/// Spec-facing capture variant: returns outputs; when `captures` is non-null
/// it receives every layer's incoming activations for this batch.
Mat network_forward_capture(const Network& net, const Mat& inputs, std::vector<Mat>* captures);

std::vector<double> layer_forward(const LayerParams& params, std::span<const double> x);
std::vector<double> network_forward(const Network& net, std::span<const double> x);

/// Per-edge first/second spatial derivative rows phi'(x_i), phi''(x_i); these
/// depend only on the value channel, so one build serves every jet axis.
struct EdgePhi {
  std::vector<Mat> phi1;  // per layer: (n_out * n_in) x N
  std::vector<Mat> phi2;
};

void build_edge_phi(const Network& net, const ForwardCache& fc, EdgePhi& ep);

/// One directional jet pass: u/w are the first/second derivative channels of
/// each layer's inputs with respect to the seeded input axis.
struct JetState {
  std::vector<Mat> u;  // layers+1 entries; u.back()/w.back() are the outputs'
  std::vector<Mat> w;  // first/second derivative rows
};

void jet_forward_batch(const Network& net, const ForwardCache& fc, const EdgePhi& ep,
                       std::size_t axis, JetState& js);

/// Exact order-2 jets of every network output with respect to input `axis`.
std::vector<Jet2> jet_forward(const Network& net, std::span<const double> x, std::size_t axis);

/// Central finite-difference fallback for cross-validation.
std::vector<Jet2> jet_forward_fd(const Network& net, std::span<const double> x, std::size_t axis,
                                 double step = 1e-3);

struct LayerGrads {
  Mat r, c;
  std::vector<double> b;
};

struct Gradients {
  std::vector<LayerGrads> layers;
  void init_like(const Network& net);
  void zero();
};

/// Reverse pass for a plain forward. `grad_inputs` (optional) receives the
/// adjoint of the network inputs.
void backward_batch(const Network& net, const ForwardCache& fc, const Mat& grad_y,
                    Gradients& grads, Mat* grad_inputs = nullptr);

/// Reverse pass through one jet pass: adjoints of (value, d1, d2) outputs.
/// Requires a depth-3 forward cache.
void jet_backward_batch(const Network& net, const ForwardCache& fc, const EdgePhi& ep,
                        const JetState& js, const Mat& grad_y, const Mat& grad_v,
                        const Mat& grad_z, Gradients& grads);

// Checkpoint container (JSON, versioned).
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace kan
