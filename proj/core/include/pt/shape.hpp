#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "pt/image.hpp"

namespace pt {

enum class KernelFamily { kGaussian, kBessel };

// Radial reproducing kernel, normalized so K(0) = 1. The Gaussian is the
// default; the Bessel form (r/tau) K1(r/tau) is the Green's-function
// surrogate for a squared second-order operator.
struct Kernel {
  KernelFamily family = KernelFamily::kGaussian;
  double width = 1.0;

  double operator()(double r) const;
  // K'(r)/r, used in the momentum force term; only evaluated at r > 0 for
  // the Bessel family (distinct points).
  double deriv_over_r(double r) const;
};

// N distinct points with attached momenta; rows are landmarks.
struct LandmarkState {
  Eigen::MatrixXd points;   // N x dim
  Eigen::MatrixXd momenta;  // N x dim

  int count() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

// Gram matrix K_ij = K(|P_i - P_j|). Throws DataError when points coincide
// (min pairwise distance < 1e-9).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, const Kernel& kernel);

// H = sum_ij K_ij (u_i . u_j); conserved along geodesics.
double kinetic_energy(const LandmarkState& state, const Kernel& kernel);

// The cometric (inverse metric) tensor is the Gram matrix itself; the metric
// quadratic form on velocities solves against it.
Eigen::MatrixXd cometric(const Eigen::MatrixXd& points, const Kernel& kernel);

// sum_ij G_ij (v_i . v_j) with G the inverse Gram matrix: the squared metric
// length of the infinitesimal displacement v.
double metric_energy(const Eigen::MatrixXd& points,
                     const Eigen::MatrixXd& velocities, const Kernel& kernel);

struct Trajectory {
  std::vector<double> times;
  std::vector<LandmarkState> states;
};

// Fixed-step classical 4th-order integration of the landmark Hamiltonian
// system dP_i/dt = 2 sum_j K_ij u_j, du_i/dt = -2 sum_j (u_i.u_j) grad K_ij.
// Aborts with DataError (carrying the time) if two points collide.
Trajectory geodesic_shoot(const LandmarkState& initial, const Kernel& kernel,
                          double t_end, double dt);

struct ShootingResult {
  double distance = 0.0;        // metric length of the unit-time geodesic
  Eigen::MatrixXd momentum;     // initial momenta realizing it
  double residual = 0.0;        // endpoint miss in Frobenius norm
  bool matched = false;
  int iterations = 0;
};

// Geodesic boundary problem by shooting: gradient descent (finite-difference
// gradients, backtracking) on the endpoint miss over initial momenta.
ShootingResult geodesic_distance(const Eigen::MatrixXd& start,
                                 const Eigen::MatrixXd& target,
                                 const Kernel& kernel, int max_iters = 200,
                                 double tol = 1e-9, double dt = 0.01);

// Closed polygon in the plane, counterclockwise and simple.
struct ShapeCurve {
  Eigen::MatrixXd vertices;  // N x 2

  int count() const { return static_cast<int>(vertices.rows()); }
  double signed_area() const;
  bool is_simple() const;
  bool is_ccw() const { return signed_area() > 0.0; }
  void validate() const;  // simple + ccw, else ModelError
};

ShapeCurve circle_curve(int num_vertices, double radius = 1.0,
                        double cx = 0.0, double cy = 0.0);

struct WalkResult {
  std::vector<ShapeCurve> curves;  // initial curve first
  bool completed = false;
  int failed_step = -1;  // step whose curve self-intersected, if any
};

// Random walk on curves: per step, draw iid Gaussian momenta scaled by
// step_size, shoot the geodesic flow for unit time, then translate by the
// constant drift. Stops early (partial result) if a curve stops being
// simple.
WalkResult shape_random_walk(const ShapeCurve& initial, const Kernel& kernel,
                             int num_steps, double step_size,
                             const Eigen::Vector2d& drift, std::uint64_t seed,
                             double dt = 0.02);

struct Canvas {
  int width = 256;
  int height = 256;
  double xmin = -2.0;
  double xmax = 2.0;
  double ymin = -2.0;
  double ymax = 2.0;
};

// Rasterizes the curve sequence onto one canvas (max-composited line
// segments, so drawing order does not matter).
ImageGrid render_curves(std::span<const ShapeCurve> curves, const Canvas& canvas);

}  // namespace pt
