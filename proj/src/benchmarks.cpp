#include "kan/benchmarks.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace kan {

double to_unit(const RegressionTask& task, std::size_t axis, double raw) {
  const double lo = task.lo[axis];
  const double hi = task.hi[axis];
  if (lo == -1.0 && hi == 1.0) return raw;
  return 2.0 * (raw - lo) / (hi - lo) - 1.0;
}

namespace {

Dataset finalize(const RegressionTask& task, Mat x_raw) {
  Dataset ds;
  const std::size_t n = x_raw.cols;
  ds.x.resize(task.dim, n);
  ds.y.resize(1, n);
  std::vector<double> pt(task.dim);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < task.dim; ++i) {
      pt[i] = x_raw.at(i, s);
      ds.x.at(i, s) = to_unit(task, i, pt[i]);
    }
    const double val = task.f(pt.data());
    if (!std::isfinite(val))
      fail("dataset generation: non-finite target for task " + task.name + " at sample " +
           std::to_string(s));
    ds.y.at(0, s) = val;
  }
  ds.x_raw = std::move(x_raw);
  return ds;
}

double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

Dataset sample_training(const RegressionTask& task, std::uint64_t seed) {
  Rng rng(mix_seed(fnv1a(task.name), seed));
  Mat x_raw(task.dim, task.n_train);
  for (std::size_t s = 0; s < task.n_train; ++s)
    for (std::size_t i = 0; i < task.dim; ++i)
      x_raw.at(i, s) = rng.uniform(task.lo[i], task.hi[i]);
  return finalize(task, std::move(x_raw));
}

Dataset test_grid(const RegressionTask& task) {
  Mat x_raw;
  if (task.dim == 1) {
    const std::size_t n = std::max<std::size_t>(256, 10 * task.n_train);
    x_raw.resize(1, n);
    for (std::size_t s = 0; s < n; ++s)
      x_raw.at(0, s) = task.lo[0] + (task.hi[0] - task.lo[0]) * static_cast<double>(s) /
                                        static_cast<double>(n - 1);
  } else if (task.dim == 2) {
    const auto needed = static_cast<std::size_t>(
        std::ceil(std::sqrt(10.0 * static_cast<double>(task.n_train))));
    const std::size_t per_axis = std::max<std::size_t>(256, needed);
    x_raw.resize(2, per_axis * per_axis);
    std::size_t s = 0;
    for (std::size_t ix = 0; ix < per_axis; ++ix) {
      const double x = task.lo[0] + (task.hi[0] - task.lo[0]) * static_cast<double>(ix) /
                                        static_cast<double>(per_axis - 1);
      for (std::size_t iy = 0; iy < per_axis; ++iy, ++s) {
        x_raw.at(0, s) = x;
        x_raw.at(1, s) = task.lo[1] + (task.hi[1] - task.lo[1]) * static_cast<double>(iy) /
                                          static_cast<double>(per_axis - 1);
      }
    }
  } else {
    static const std::uint64_t primes[6] = {2, 3, 5, 7, 11, 13};
    require(task.dim <= 6, "test_grid: dimensions above 6 unsupported");
    const std::size_t n = 100000;
    x_raw.resize(task.dim, n);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t i = 0; i < task.dim; ++i)
        x_raw.at(i, s) =
            task.lo[i] + (task.hi[i] - task.lo[i]) * halton(s + 1, primes[i]);
  }
  return finalize(task, std::move(x_raw));
}

namespace {

RegressionTask box_task(std::string name, std::size_t dim, double lo, double hi,
                        std::function<double(const double*)> f, std::string trait) {
  RegressionTask t;
  t.name = std::move(name);
  t.dim = dim;
  t.lo.assign(dim, lo);
  t.hi.assign(dim, hi);
  t.f = std::move(f);
  t.trait = std::move(trait);
  return t;
}

}  // namespace

RegressionTask gaussian_bump_task() {
  RegressionTask t = box_task("gaussian_bump", 1, -1.0, 1.0,
                              [](const double* x) { return std::exp(-200.0 * x[0] * x[0]); },
                              "bump");
  t.n_train = 1000;
  t.sharpness = 200.0;
  return t;
}

std::vector<RegressionTask> synthetic_suite() {
  std::vector<RegressionTask> suite;

  RegressionTask s1 = box_task("s01_sharp_bump_1d", 1, -1.0, 1.0,
                               [](const double* x) { return std::exp(-200.0 * x[0] * x[0]); },
                               "bump");
  s1.sharpness = 200.0;
  suite.push_back(std::move(s1));

  RegressionTask s2 = box_task(
      "s02_step_1d", 1, -1.0, 1.0,
      [](const double* x) { return (x[0] < 0.3 ? -0.5 : 0.5) + 0.25 * x[0]; }, "jump");
  s2.jump_gap = 1.0;
  suite.push_back(std::move(s2));

  suite.push_back(box_task("s03_wave_packet_1d", 1, -1.0, 1.0,
                           [](const double* x) {
                             return std::sin(10.0 * M_PI * x[0]) *
                                    std::exp(-25.0 * x[0] * x[0]);
                           },
                           "oscillatory"));

  suite.push_back(box_task("s04_tanh_ridge_2d", 2, -1.0, 1.0,
                           [](const double* x) { return std::tanh(20.0 * (x[0] + x[1])); },
                           "front"));

  RegressionTask s5 = box_task(
      "s05_sharp_bump_2d", 2, -1.0, 1.0,
      [](const double* x) { return std::exp(-200.0 * (x[0] * x[0] + x[1] * x[1])); }, "bump");
  s5.sharpness = 200.0;
  suite.push_back(std::move(s5));

  RegressionTask s6 = box_task("s06_bump_wave_3d", 3, -1.0, 1.0,
                               [](const double* x) {
                                 return std::exp(-100.0 * (x[0] * x[0] + x[1] * x[1])) *
                                        (1.0 + 0.5 * std::sin(M_PI * x[2]));
                               },
                               "bump");
  s6.sharpness = 100.0;
  suite.push_back(std::move(s6));

  RegressionTask s7 = box_task("s07_bump_4d", 4, -1.0, 1.0,
                               [](const double* x) {
                                 double q = 0.0;
                                 for (int i = 0; i < 4; ++i) {
                                   const double d = x[i] - 0.2;
                                   q += d * d;
                                 }
                                 return std::exp(-8.0 * q);
                               },
                               "bump");
  s7.sharpness = 8.0;
  suite.push_back(std::move(s7));

  RegressionTask s8 = box_task("s08_add_bumps_5d", 5, -1.0, 1.0,
                               [](const double* x) {
                                 static const double c[5] = {-0.6, -0.3, 0.0, 0.3, 0.6};
                                 double acc = 0.0;
                                 for (int i = 0; i < 5; ++i) {
                                   const double d = x[i] - c[i];
                                   acc += std::exp(-80.0 * d * d);
                                 }
                                 return acc;
                               },
                               "bump");
  s8.sharpness = 80.0;
  suite.push_back(std::move(s8));

  suite.push_back(box_task("s09_ridge_5d", 5, -1.0, 1.0,
                           [](const double* x) {
                             double acc = 0.0;
                             for (int i = 0; i < 5; ++i) acc += x[i];
                             return std::tanh(10.0 * (acc / std::sqrt(5.0) - 0.3));
                           },
                           "front"));

  suite.push_back(box_task("s10_osc_add_6d", 6, -1.0, 1.0,
                           [](const double* x) {
                             double acc = 0.0;
                             for (int i = 0; i < 6; ++i)
                               acc += std::sin(M_PI * x[i]) * std::exp(-20.0 * x[i] * x[i]);
                             return acc;
                           },
                           "oscillatory"));

  for (RegressionTask& t : suite) {
    t.n_train = 4000;
    t.note = "stand-in";
  }
  return suite;
}

namespace {

RegressionTask feynman_task(std::string index, std::size_t dim,
                            std::function<double(const double*)> f) {
  RegressionTask t;
  t.name = std::move(index);
  t.dim = dim;
  t.lo.assign(dim, 1.0);
  t.hi.assign(dim, 2.0);
  t.f = std::move(f);
  t.n_train = 4000;
  t.trait = "smooth";
  return t;
}

}  // namespace

std::vector<RegressionTask> feynman_subset() {
  std::vector<RegressionTask> v;
  // variables listed in sampling order
  v.push_back(feynman_task("I.6.2", 2, [](const double* x) {
    const double sigma = x[0], theta = x[1];
    return std::exp(-theta * theta / (2.0 * sigma * sigma)) /
           (std::sqrt(2.0 * M_PI) * sigma);
  }));
  v.push_back(feynman_task("I.12.11", 5, [](const double* x) {
    const double q = x[0], ef = x[1], bfield = x[2], vel = x[3], theta = x[4];
    return q * (ef + bfield * vel * std::sin(theta));
  }));
  v.push_back(feynman_task("I.13.12", 5, [](const double* x) {
    const double grav = x[0], m1 = x[1], m2 = x[2], r1 = x[3], r2 = x[4];
    return grav * m1 * m2 * (1.0 / r2 - 1.0 / r1);
  }));
  v.push_back(feynman_task("I.16.6", 3, [](const double* x) {
    const double c = x[0], v = x[1], u = x[2];
    return (u + v) / (1.0 + u * v / (c * c));
  }));
  v.push_back(feynman_task("I.18.4", 4, [](const double* x) {
    const double m1 = x[0], m2 = x[1], r1 = x[2], r2 = x[3];
    return (m1 * r1 + m2 * r2) / (m1 + m2);
  }));
  v.push_back(feynman_task("I.27.6", 3, [](const double* x) {
    const double d1 = x[0], d2 = x[1], n = x[2];
    return 1.0 / (1.0 / d1 + n / d2);
  }));
  v.push_back(feynman_task("I.29.16", 4, [](const double* x) {
    const double x1 = x[0], x2 = x[1], t1 = x[2], t2 = x[3];
    return std::sqrt(x1 * x1 + x2 * x2 - 2.0 * x1 * x2 * std::cos(t1 - t2));
  }));
  v.push_back(feynman_task("I.30.3", 3, [](const double* x) {
    const double int0 = x[0], theta = x[1], n = x[2];
    const double s = std::sin(theta / 2.0);
    const double sn = std::sin(n * theta / 2.0);
    return int0 * sn * sn / (s * s);
  }));
  v.push_back(feynman_task("I.40.1", 6, [](const double* x) {
    const double n0 = x[0], m = x[1], g = x[2], h = x[3], kb = x[4], temp = x[5];
    return n0 * std::exp(-m * g * h / (kb * temp));
  }));
  v.push_back(feynman_task("II.2.42", 5, [](const double* x) {
    const double kappa = x[0], t2 = x[1], t1 = x[2], area = x[3], d = x[4];
    return kappa * (t2 - t1) * area / d;
  }));
  v.push_back(feynman_task("II.6.15a", 6, [](const double* x) {
    const double eps = x[0], pd = x[1], r = x[2], xx = x[3], yy = x[4], zz = x[5];
    return pd / (4.0 * M_PI * eps) * 3.0 * zz / std::pow(r, 5.0) *
           std::sqrt(xx * xx + yy * yy);
  }));
  v.push_back(feynman_task("II.11.7", 6, [](const double* x) {
    const double n0 = x[0], pd = x[1], ef = x[2], theta = x[3], kb = x[4], temp = x[5];
    return n0 * (1.0 + pd * ef * std::cos(theta) / (kb * temp));
  }));
  v.push_back(feynman_task("II.35.18", 5, [](const double* x) {
    const double n0 = x[0], mom = x[1], bfield = x[2], kb = x[3], temp = x[4];
    const double a = mom * bfield / (kb * temp);
    return n0 / (std::exp(a) + std::exp(-a));
  }));
  v.push_back(feynman_task("II.36.38", 8, [](const double* x) {
    const double mom = x[0], hfield = x[1], kb = x[2], temp = x[3], alpha = x[4], eps = x[5],
                 c = x[6], mag = x[7];
    return mom * hfield / (kb * temp) + mom * alpha * mag / (eps * c * c * kb * temp);
  }));
  v.push_back(feynman_task("III.17.37", 3, [](const double* x) {
    const double beta = x[0], alpha = x[1], theta = x[2];
    return beta * (1.0 + alpha * std::cos(theta));
  }));
  return v;
}

double HelmholtzProblem::u_true(double x, double y) const {
  return std::sin(a1 * M_PI * x) * std::sin(a2 * M_PI * y);
}

double HelmholtzProblem::forcing(double x, double y) const {
  const double lap = static_cast<double>(a1 * a1 + a2 * a2) * M_PI * M_PI;
  return (k * k - lap) * u_true(x, y);
}

PinnProblem HelmholtzProblem::pinn() const {
  PinnProblem p;
  const int a1c = a1, a2c = a2;
  const double kc = k;
  p.k = kc;
  p.forcing = [a1c, a2c, kc](double x, double y) {
    const double lap = static_cast<double>(a1c * a1c + a2c * a2c) * M_PI * M_PI;
    return (kc * kc - lap) * std::sin(a1c * M_PI * x) * std::sin(a2c * M_PI * y);
  };
  return p;
}

HelmholtzProblem helmholtz_problem(int a1, int a2, std::size_t per_axis, std::size_t per_edge) {
  require(a1 >= 1 && a2 >= 1, "helmholtz_problem: frequencies must be positive integers");
  HelmholtzProblem hp;
  hp.a1 = a1;
  hp.a2 = a2;

  hp.collocation.resize(2, per_axis * per_axis);
  std::size_t s = 0;
  for (std::size_t ix = 0; ix < per_axis; ++ix) {
    const double x = -1.0 + (2.0 * static_cast<double>(ix) + 1.0) / static_cast<double>(per_axis);
    for (std::size_t iy = 0; iy < per_axis; ++iy, ++s) {
      hp.collocation.at(0, s) = x;
      hp.collocation.at(1, s) =
          -1.0 + (2.0 * static_cast<double>(iy) + 1.0) / static_cast<double>(per_axis);
    }
  }

  hp.boundary.resize(2, 4 * per_edge);
  s = 0;
  for (std::size_t e = 0; e < per_edge; ++e) {
    const double t = -1.0 + 2.0 * static_cast<double>(e) / static_cast<double>(per_edge - 1);
    hp.boundary.at(0, s) = -1.0;
    hp.boundary.at(1, s++) = t;
    hp.boundary.at(0, s) = 1.0;
    hp.boundary.at(1, s++) = t;
    hp.boundary.at(0, s) = t;
    hp.boundary.at(1, s++) = -1.0;
    hp.boundary.at(0, s) = t;
    hp.boundary.at(1, s++) = 1.0;
  }
  return hp;
}

void write_dataset_csv(const std::string& path, const Mat& x, const Mat& y) {
  require(x.cols == y.cols, "write_dataset_csv: sample count mismatch");
  std::ofstream out(path);
  require(out.good(), "write_dataset_csv: cannot open " + path);
  for (std::size_t i = 0; i < x.rows; ++i) out << "x_" << (i + 1) << ',';
  out << "y\n";
  out.precision(17);
  for (std::size_t s = 0; s < x.cols; ++s) {
    for (std::size_t i = 0; i < x.rows; ++i) out << x.at(i, s) << ',';
    out << y.at(0, s) << '\n';
  }
  require(out.good(), "write_dataset_csv: write failed");
}

std::pair<Mat, Mat> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_dataset_csv: cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_dataset_csv: empty file");
  std::size_t dim = 0;
  {
    std::stringstream header(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(header, cell, ',')) cells.push_back(cell);
    require(cells.size() >= 2 && cells.back() == "y", "read_dataset_csv: bad header");
    dim = cells.size() - 1;
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    require(vals.size() == dim + 1, "read_dataset_csv: bad row width");
    rows.push_back(std::move(vals));
  }
  Mat x(dim, rows.size()), y(1, rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t i = 0; i < dim; ++i) x.at(i, s) = rows[s][i];
    y.at(0, s) = rows[s][dim];
  }
  return {std::move(x), std::move(y)};
}

}  // namespace kan
