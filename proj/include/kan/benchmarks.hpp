#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kan/common.hpp"
#include "kan/training.hpp"

namespace kan {

/// A regression target over a sampling box. `f` takes raw box coordinates;
/// the engine consumes inputs affinely mapped to [-1,1]^dim (datasets carry
/// the mapped coordinates, CSV exports the raw ones).
struct RegressionTask {
  std::string name;
  std::size_t dim = 1;
  std::vector<double> lo, hi;
  std::function<double(const double*)> f;
  std::size_t n_train = 4000;
  std::string trait;       // bump | jump | oscillatory | front | smooth
  double sharpness = 0.0;  // bump curvature scale, for trait filtering
  double jump_gap = 0.0;   // documented discontinuity gap
  std::string note;
};

struct Dataset {
  Mat x;      // dim x N, network coordinates in [-1,1]
  Mat x_raw;  // dim x N, raw box coordinates
  Mat y;      // 1 x N
};

double to_unit(const RegressionTask& task, std::size_t axis, double raw);

Dataset sample_training(const RegressionTask& task, std::uint64_t seed);

/// Dense reference set: inclusive tensor grids for dim <= 2 (at least 256 per
/// axis and >= 10x the training count), Halton points (1e5) for dim >= 3.
Dataset test_grid(const RegressionTask& task);

/// 1D sharp Gaussian exp(-200 x^2) on [-1,1], N = 1000.
RegressionTask gaussian_bump_task();

/// Ten stand-in tasks covering dimensions 1-6 with localized bumps, a jump
/// discontinuity and an oscillatory region.
std::vector<RegressionTask> synthetic_suite();

/// Fifteen dimensionless physics equations by catalog index.
std::vector<RegressionTask> feynman_subset();

struct HelmholtzProblem {
  int a1 = 1;
  int a2 = 1;
  double k = 1.0;
  Mat collocation;  // 2 x (per_axis^2) interior cell centers of [-1,1]^2
  Mat boundary;     // 2 x (4 * per_edge) edge points, corners included per edge

  double u_true(double x, double y) const;
  double forcing(double x, double y) const;
  PinnProblem pinn() const;
};

HelmholtzProblem helmholtz_problem(int a1, int a2, std::size_t per_axis = 64,
                                   std::size_t per_edge = 64);

// Dataset CSV: header row x_1..x_d,y
void write_dataset_csv(const std::string& path, const Mat& x, const Mat& y);
std::pair<Mat, Mat> read_dataset_csv(const std::string& path);

}  // namespace kan
