#include "kan/network.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kan/kernels.hpp"

namespace kan {

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_deriv(double x, int order) {
  const double sg = 1.0 / (1.0 + std::exp(-x));
  const double s1 = sg * (1.0 - sg);
  switch (order) {
    case 0:
      return x * sg;
    case 1:
      return sg + x * s1;
    case 2: {
      const double s2 = s1 * (1.0 - 2.0 * sg);
      return 2.0 * s1 + x * s2;
    }
    case 3: {
      const double s2 = s1 * (1.0 - 2.0 * sg);
      const double s3 = s2 * (1.0 - 2.0 * sg) - 2.0 * s1 * s1;
      return 3.0 * s2 + x * s3;
    }
    default:
      fail("silu_deriv: order out of range");
  }
}

Jet2 silu_jet(const Jet2& in) {
  const double f1 = silu_deriv(in.value, 1);
  const double f2 = silu_deriv(in.value, 2);
  return {silu(in.value), f1 * in.d1, f2 * in.d1 * in.d1 + f1 * in.d2};
}

LayerParams init_layer(std::size_t n_in, std::size_t n_out, std::size_t grid_intervals,
                       int order_k, std::uint64_t seed) {
  require(n_in >= 1 && n_out >= 1, "init_layer: dimensions must be positive");
  LayerParams p;
  p.n_in = n_in;
  p.n_out = n_out;
  p.order_k = order_k;
  p.knots.reserve(n_in);
  for (std::size_t i = 0; i < n_in; ++i)
    p.knots.push_back(uniform_knots(-1.0, 1.0, grid_intervals, order_k));

  const std::size_t nb = p.knots[0].basis_count();
  p.r.resize(n_out, n_in);
  p.c.resize(n_out, n_in);
  p.b.assign(n_out * n_in * nb, 0.0);

  Rng rng(seed);
  const double r_std = std::sqrt(2.0 / static_cast<double>(n_in + n_out));
  const double b_std = std::sqrt(2.0 / (static_cast<double>(n_in + n_out) * static_cast<double>(nb)));
  for (double& v : p.r.v) v = rng.normal(r_std);
  for (double& v : p.c.v) v = 1.0;
  for (double& v : p.b) v = rng.normal(b_std);
  return p;
}

Network init_network(const std::vector<std::size_t>& widths, std::size_t grid_intervals,
                     int order_k, std::uint64_t seed) {
  require(widths.size() >= 2, "init_network: need at least one layer");
  Network net;
  net.widths = widths;
  net.order_k = order_k;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l)
    net.layers.push_back(
        init_layer(widths[l], widths[l + 1], grid_intervals, order_k, mix_seed(seed, l)));
  return net;
}

namespace {

void fill_silu_rows(LayerCache& lc, int depth) {
  const std::size_t n_in = lc.x.rows;
  const std::size_t n = lc.x.cols;
  for (int r = 0; r <= depth; ++r) lc.silu[r].resize(n_in, n);
  for (std::size_t i = 0; i < n_in; ++i) {
    const double* xi = lc.x.row(i);
    for (std::size_t s = 0; s < n; ++s) {
      const double x = xi[s];
      const double sg = 1.0 / (1.0 + std::exp(-x));
      const double s1 = sg * (1.0 - sg);
      lc.silu[0].row(i)[s] = x * sg;
      if (depth >= 1) lc.silu[1].row(i)[s] = sg + x * s1;
      if (depth >= 2) {
        const double s2 = s1 * (1.0 - 2.0 * sg);
        lc.silu[2].row(i)[s] = 2.0 * s1 + x * s2;
        if (depth >= 3) {
          const double s3 = s2 * (1.0 - 2.0 * sg) - 2.0 * s1 * s1;
          lc.silu[3].row(i)[s] = 3.0 * s2 + x * s3;
        }
      }
    }
  }
}

void layer_forward_cached(const LayerParams& p, LayerCache& lc, int depth, Mat& y) {
  const std::size_t n = lc.x.cols;
  const std::size_t nb = p.basis_count();
  fill_silu_rows(lc, depth);

  lc.basis.resize(p.n_in);
  for (std::size_t i = 0; i < p.n_in; ++i) {
    double* out[4] = {nullptr, nullptr, nullptr, nullptr};
    for (int r = 0; r <= depth; ++r) {
      lc.basis[i][r].resize(nb, n);
      out[r] = lc.basis[i][r].v.data();
    }
    eval_basis_batch(p.knots[i], lc.x.row(i), n, depth, out);
  }
  lc.depth = depth;

  y.resize(p.n_out, n);
  std::vector<double> folded(nb);
  for (std::size_t j = 0; j < p.n_out; ++j) {
    double* yj = y.row(j);
    for (std::size_t i = 0; i < p.n_in; ++i) {
      const double cji = p.c.at(j, i);
      const double* be = p.b_edge(j, i);
      for (std::size_t m = 0; m < nb; ++m) folded[m] = cji * be[m];
      kernels::vm_accum(yj, folded.data(), lc.basis[i][0].v.data(), nb, n);
      kernels::axpy(yj, p.r.at(j, i), lc.silu[0].row(i), n);
    }
  }
}

}  // namespace

void network_forward_batch(const Network& net, const Mat& inputs, int depth, ForwardCache& fc) {
  require(inputs.rows == net.n_inputs(), "network_forward_batch: input width mismatch");
  const std::size_t nl = net.layers.size();
  fc.layers.resize(nl);
  Mat cur = inputs;
  for (std::size_t l = 0; l < nl; ++l) {
    fc.layers[l].x = std::move(cur);
    Mat y;
    layer_forward_cached(net.layers[l], fc.layers[l], depth, y);
    cur = std::move(y);
  }
  fc.y = std::move(cur);
}

Mat network_eval(const Network& net, const Mat& inputs) {
  ForwardCache fc;
  network_forward_batch(net, inputs, 0, fc);
  return std::move(fc.y);
}

Mat network_forward_capture(const Network& net, const Mat& inputs, std::vector<Mat>* captures) {
  ForwardCache fc;
  network_forward_batch(net, inputs, 0, fc);
  if (captures) {
    captures->clear();
    for (auto& lc : fc.layers) captures->push_back(lc.x);
  }
  return std::move(fc.y);
}

std::vector<double> layer_forward(const LayerParams& params, std::span<const double> x) {
  require(x.size() == params.n_in, "layer_forward: input width mismatch");
  Network one;
  one.widths = {params.n_in, params.n_out};
  one.order_k = params.order_k;
  one.layers.push_back(params);
  return network_forward(one, x);
}

std::vector<double> network_forward(const Network& net, std::span<const double> x) {
  require(x.size() == net.n_inputs(), "network_forward: input width mismatch");
  Mat input(net.n_inputs(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) input.at(i, 0) = x[i];
  Mat y = network_eval(net, input);
  std::vector<double> out(y.rows);
  for (std::size_t j = 0; j < y.rows; ++j) out[j] = y.at(j, 0);
  return out;
}

void build_edge_phi(const Network& net, const ForwardCache& fc, EdgePhi& ep) {
  const std::size_t nl = net.layers.size();
  ep.phi1.resize(nl);
  ep.phi2.resize(nl);
  std::vector<double> folded;
  for (std::size_t l = 0; l < nl; ++l) {
    const LayerParams& p = net.layers[l];
    const LayerCache& lc = fc.layers[l];
    require(lc.depth >= 2, "build_edge_phi: forward cache depth < 2");
    const std::size_t n = lc.x.cols;
    const std::size_t nb = p.basis_count();
    ep.phi1[l].resize(p.n_out * p.n_in, n);
    ep.phi2[l].resize(p.n_out * p.n_in, n);
    folded.resize(nb);
    for (std::size_t j = 0; j < p.n_out; ++j) {
      for (std::size_t i = 0; i < p.n_in; ++i) {
        const std::size_t e = j * p.n_in + i;
        const double cji = p.c.at(j, i);
        const double* be = p.b_edge(j, i);
        for (std::size_t m = 0; m < nb; ++m) folded[m] = cji * be[m];
        kernels::vm_accum(ep.phi1[l].row(e), folded.data(), lc.basis[i][1].v.data(), nb, n);
        kernels::axpy(ep.phi1[l].row(e), p.r.at(j, i), lc.silu[1].row(i), n);
        kernels::vm_accum(ep.phi2[l].row(e), folded.data(), lc.basis[i][2].v.data(), nb, n);
        kernels::axpy(ep.phi2[l].row(e), p.r.at(j, i), lc.silu[2].row(i), n);
      }
    }
  }
}

void jet_forward_batch(const Network& net, const ForwardCache& fc, const EdgePhi& ep,
                       std::size_t axis, JetState& js) {
  require(axis < net.n_inputs(), "jet_forward_batch: axis out of range");
  const std::size_t nl = net.layers.size();
  const std::size_t n = fc.layers[0].x.cols;
  js.u.resize(nl + 1);
  js.w.resize(nl + 1);
  js.u[0].resize(net.n_inputs(), n);
  js.w[0].resize(net.n_inputs(), n);
  double* seed = js.u[0].row(axis);
  for (std::size_t s = 0; s < n; ++s) seed[s] = 1.0;

  for (std::size_t l = 0; l < nl; ++l) {
    const LayerParams& p = net.layers[l];
    js.u[l + 1].resize(p.n_out, n);
    js.w[l + 1].resize(p.n_out, n);
    for (std::size_t j = 0; j < p.n_out; ++j) {
      double* vj = js.u[l + 1].row(j);
      double* zj = js.w[l + 1].row(j);
      for (std::size_t i = 0; i < p.n_in; ++i) {
        const std::size_t e = j * p.n_in + i;
        const double* p1 = ep.phi1[l].row(e);
        const double* p2 = ep.phi2[l].row(e);
        const double* ui = js.u[l].row(i);
        const double* wi = js.w[l].row(i);
        kernels::mul_accum(vj, p1, ui, n);
        kernels::mul3_accum(zj, p2, ui, ui, n);
        kernels::mul_accum(zj, p1, wi, n);
      }
    }
  }
}

std::vector<Jet2> jet_forward(const Network& net, std::span<const double> x, std::size_t axis) {
  require(x.size() == net.n_inputs(), "jet_forward: input width mismatch");
  Mat input(net.n_inputs(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) input.at(i, 0) = x[i];
  ForwardCache fc;
  network_forward_batch(net, input, 2, fc);
  EdgePhi ep;
  build_edge_phi(net, fc, ep);
  JetState js;
  jet_forward_batch(net, fc, ep, axis, js);
  std::vector<Jet2> out(net.n_outputs());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = {fc.y.at(j, 0), js.u.back().at(j, 0), js.w.back().at(j, 0)};
  return out;
}

std::vector<Jet2> jet_forward_fd(const Network& net, std::span<const double> x, std::size_t axis,
                                 double step) {
  std::vector<double> probe(x.begin(), x.end());
  const auto mid = network_forward(net, probe);
  probe[axis] = x[axis] + step;
  const auto hi = network_forward(net, probe);
  probe[axis] = x[axis] - step;
  const auto lo = network_forward(net, probe);
  std::vector<Jet2> out(mid.size());
  for (std::size_t j = 0; j < mid.size(); ++j) {
    out[j].value = mid[j];
    out[j].d1 = (hi[j] - lo[j]) / (2.0 * step);
    out[j].d2 = (hi[j] - 2.0 * mid[j] + lo[j]) / (step * step);
  }
  return out;
}

void Gradients::init_like(const Network& net) {
  layers.resize(net.layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerParams& p = net.layers[l];
    layers[l].r.resize(p.n_out, p.n_in);
    layers[l].c.resize(p.n_out, p.n_in);
    layers[l].b.assign(p.b.size(), 0.0);
  }
}

void Gradients::zero() {
  for (auto& lg : layers) {
    lg.r.zero();
    lg.c.zero();
    std::fill(lg.b.begin(), lg.b.end(), 0.0);
  }
}

void backward_batch(const Network& net, const ForwardCache& fc, const Mat& grad_y,
                    Gradients& grads, Mat* grad_inputs) {
  const std::size_t nl = net.layers.size();
  require(grads.layers.size() == nl, "backward_batch: gradients not initialized");
  Mat g = grad_y;
  std::vector<double> d;
  std::vector<double> col;
  Mat fmat;
  for (std::size_t l = nl; l-- > 0;) {
    const LayerParams& p = net.layers[l];
    const LayerCache& lc = fc.layers[l];
    require(lc.depth >= 1, "backward_batch: forward cache depth < 1");
    const std::size_t n = lc.x.cols;
    const std::size_t nb = p.basis_count();
    LayerGrads& lg = grads.layers[l];

    d.resize(nb);
    for (std::size_t j = 0; j < p.n_out; ++j) {
      const double* gj = g.row(j);
      for (std::size_t i = 0; i < p.n_in; ++i) {
        std::fill(d.begin(), d.end(), 0.0);
        kernels::mv_dots(d.data(), gj, lc.basis[i][0].v.data(), nb, n);
        const double cji = p.c.at(j, i);
        const double* be = p.b_edge(j, i);
        double* gb = lg.b.data() + (j * p.n_in + i) * nb;
        double cdot = 0.0;
        for (std::size_t m = 0; m < nb; ++m) {
          gb[m] += cji * d[m];
          cdot += be[m] * d[m];
        }
        lg.c.at(j, i) += cdot;
        kernels::mv_dots(&lg.r.at(j, i), gj, lc.silu[0].row(i), 1, n);
      }
    }

    const bool want_gx = (l > 0) || (grad_inputs != nullptr);
    if (!want_gx) break;

    Mat gx(p.n_in, n);
    col.resize(p.n_out);
    fmat.resize(nb, n);
    for (std::size_t i = 0; i < p.n_in; ++i) {
      // residual path: gx_i += (sum_j g_j r_ji) .* silu'(x_i)
      std::vector<double> erow(n, 0.0);
      for (std::size_t j = 0; j < p.n_out; ++j) col[j] = p.r.at(j, i);
      kernels::vm_accum(erow.data(), col.data(), g.v.data(), p.n_out, n);
      kernels::mul_accum(gx.row(i), erow.data(), lc.silu[1].row(i), n);
      // spline path: gx_i += sum_m B'_m(x_i) .* (sum_j g_j c_ji b_jim)
      fmat.zero();
      for (std::size_t m = 0; m < nb; ++m) {
        for (std::size_t j = 0; j < p.n_out; ++j) col[j] = p.c.at(j, i) * p.b_edge(j, i)[m];
        kernels::vm_accum(fmat.row(m), col.data(), g.v.data(), p.n_out, n);
      }
      kernels::rows_mul_accum(gx.row(i), lc.basis[i][1].v.data(), fmat.v.data(), nb, n);
    }
    g = std::move(gx);
  }
  if (grad_inputs) *grad_inputs = std::move(g);
}

void jet_backward_batch(const Network& net, const ForwardCache& fc, const EdgePhi& ep,
                        const JetState& js, const Mat& grad_y, const Mat& grad_v,
                        const Mat& grad_z, Gradients& grads) {
  const std::size_t nl = net.layers.size();
  Mat gy = grad_y;
  Mat gv = grad_v;
  Mat gz = grad_z;
  std::vector<double> d, folded;
  for (std::size_t l = nl; l-- > 0;) {
    const LayerParams& p = net.layers[l];
    const LayerCache& lc = fc.layers[l];
    require(lc.depth >= 3, "jet_backward_batch: forward cache depth < 3");
    const std::size_t n = lc.x.cols;
    const std::size_t nb = p.basis_count();
    LayerGrads& lg = grads.layers[l];

    Mat gx(p.n_in, n), gu(p.n_in, n), gw(p.n_in, n);
    std::vector<double> q1(n), q2(n), p3(n), gz2(n);
    d.resize(3 * nb);
    folded.resize(nb);
    for (std::size_t j = 0; j < p.n_out; ++j) {
      const double* gyj = gy.row(j);
      const double* gvj = gv.row(j);
      const double* gzj = gz.row(j);
      for (std::size_t s = 0; s < n; ++s) gz2[s] = 2.0 * gzj[s];
      for (std::size_t i = 0; i < p.n_in; ++i) {
        const std::size_t e = j * p.n_in + i;
        const double* ui = js.u[l].row(i);
        const double* wi = js.w[l].row(i);
        std::fill(q1.begin(), q1.end(), 0.0);
        kernels::mul_accum(q1.data(), gvj, ui, n);
        kernels::mul_accum(q1.data(), gzj, wi, n);
        std::fill(q2.begin(), q2.end(), 0.0);
        kernels::mul3_accum(q2.data(), gzj, ui, ui, n);

        // parameter adjoints
        std::fill(d.begin(), d.end(), 0.0);
        kernels::mv_dots(d.data(), gyj, lc.basis[i][0].v.data(), nb, n);
        kernels::mv_dots(d.data() + nb, q1.data(), lc.basis[i][1].v.data(), nb, n);
        kernels::mv_dots(d.data() + 2 * nb, q2.data(), lc.basis[i][2].v.data(), nb, n);
        const double cji = p.c.at(j, i);
        const double* be = p.b_edge(j, i);
        double* gb = lg.b.data() + (j * p.n_in + i) * nb;
        double cdot = 0.0;
        for (std::size_t m = 0; m < nb; ++m) {
          const double dm = d[m] + d[nb + m] + d[2 * nb + m];
          gb[m] += cji * dm;
          cdot += be[m] * dm;
        }
        lg.c.at(j, i) += cdot;
        kernels::mv_dots(&lg.r.at(j, i), gyj, lc.silu[0].row(i), 1, n);
        kernels::mv_dots(&lg.r.at(j, i), q1.data(), lc.silu[1].row(i), 1, n);
        kernels::mv_dots(&lg.r.at(j, i), q2.data(), lc.silu[2].row(i), 1, n);

        // phi''' row for the x adjoint
        std::fill(p3.begin(), p3.end(), 0.0);
        for (std::size_t m = 0; m < nb; ++m) folded[m] = cji * be[m];
        kernels::vm_accum(p3.data(), folded.data(), lc.basis[i][3].v.data(), nb, n);
        kernels::axpy(p3.data(), p.r.at(j, i), lc.silu[3].row(i), n);

        const double* p1 = ep.phi1[l].row(e);
        const double* p2 = ep.phi2[l].row(e);
        kernels::mul_accum(gx.row(i), gyj, p1, n);
        kernels::mul_accum(gx.row(i), q1.data(), p2, n);
        kernels::mul_accum(gx.row(i), q2.data(), p3.data(), n);
        kernels::mul_accum(gu.row(i), gvj, p1, n);
        kernels::mul3_accum(gu.row(i), gz2.data(), p2, ui, n);
        kernels::mul_accum(gw.row(i), gzj, p1, n);
      }
    }
    gy = std::move(gx);
    gv = std::move(gu);
    gz = std::move(gw);
  }
}

void save_network(const Network& net, const std::string& path) {
  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["order_k"] = net.order_k;
  doc["widths"] = net.widths;
  nlohmann::json layers = nlohmann::json::array();
  for (const LayerParams& p : net.layers) {
    nlohmann::json jl;
    nlohmann::json knots = nlohmann::json::array();
    for (const KnotVector& kv : p.knots) knots.push_back(kv.primary);
    jl["knots_primary"] = std::move(knots);
    jl["r"] = p.r.v;
    jl["c"] = p.c.v;
    jl["b"] = p.b;
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  std::ofstream out(path);
  require(out.good(), "save_network: cannot open " + path);
  out << doc.dump();
  require(out.good(), "save_network: write failed for " + path);
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_network: cannot open " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  require(doc.contains("format_version"), "load_network: missing format_version");
  require(doc["format_version"].get<int>() == 1, "load_network: unsupported format_version");

  Network net;
  net.order_k = doc["order_k"].get<int>();
  net.widths = doc["widths"].get<std::vector<std::size_t>>();
  for (const auto& jl : doc["layers"]) {
    LayerParams p;
    p.order_k = net.order_k;
    for (const auto& prim : jl["knots_primary"])
      p.knots.push_back(augment_knots(prim.get<std::vector<double>>(), net.order_k));
    p.n_in = p.knots.size();
    p.r.v = jl["r"].get<std::vector<double>>();
    p.c.v = jl["c"].get<std::vector<double>>();
    p.n_out = p.r.v.size() / p.n_in;
    p.r.rows = p.c.rows = p.n_out;
    p.r.cols = p.c.cols = p.n_in;
    p.b = jl["b"].get<std::vector<double>>();
    require(p.b.size() == p.n_out * p.n_in * p.basis_count(),
            "load_network: coefficient tensor shape mismatch");
    net.layers.push_back(std::move(p));
  }
  require(net.layers.size() + 1 == net.widths.size(), "load_network: layer count mismatch");
  return net;
}

}  // namespace kan
