#include "pt/shape.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

double Kernel::operator()(double r) const {
  switch (family) {
    case KernelFamily::kGaussian:
      return std::exp(-r * r / (2.0 * width * width));
    case KernelFamily::kBessel: {
      if (r <= 0.0) return 1.0;
      const double z = r / width;
      return z * std::cyl_bessel_k(1, z);
    }
  }
  return 0.0;
}

double Kernel::deriv_over_r(double r) const {
  switch (family) {
    case KernelFamily::kGaussian:
      return -(*this)(r) / (width * width);
    case KernelFamily::kBessel: {
      // d/dr [(r/tau) K1(r/tau)] = -(r/tau^2) K0(r/tau)
      const double z = r / width;
      return -std::cyl_bessel_k(0, z) / (width * width);
    }
  }
  return 0.0;
}

namespace {

constexpr double kCollisionDistance = 1e-9;

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points.rows(); ++i)
    for (int j = i + 1; j < points.rows(); ++j)
      best = std::min(best, (points.row(i) - points.row(j)).norm());
  return best;
}

void check_distinct(const Eigen::MatrixXd& points) {
  if (points.rows() > 1 && min_pairwise_distance(points) < kCollisionDistance)
    throw DataError("coincident landmark points");
}

}  // namespace

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, const Kernel& kernel) {
  check_distinct(points);
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    gram(i, i) = kernel(0.0);
    for (int j = i + 1; j < n; ++j) {
      const double value = kernel((points.row(i) - points.row(j)).norm());
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

double kinetic_energy(const LandmarkState& state, const Kernel& kernel) {
  const Eigen::MatrixXd gram = gram_matrix(state.points, kernel);
  return (state.momenta.transpose() * gram * state.momenta).trace();
}

Eigen::MatrixXd cometric(const Eigen::MatrixXd& points, const Kernel& kernel) {
  return gram_matrix(points, kernel);
}

double metric_energy(const Eigen::MatrixXd& points,
                     const Eigen::MatrixXd& velocities, const Kernel& kernel) {
  const Eigen::MatrixXd gram = gram_matrix(points, kernel);
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw DataError("singular Gram matrix (coincident points?)");
  const Eigen::MatrixXd gv = solver.solve(velocities);
  return (velocities.transpose() * gv).trace();
}

namespace {

struct Derivative {
  Eigen::MatrixXd d_points;
  Eigen::MatrixXd d_momenta;
};

// Hamiltonian flow of H = sum_ij K_ij (u_i . u_j). The force term is
// antisymmetric in (i, j), so total momentum is conserved identically.
Derivative flow_derivative(const Eigen::MatrixXd& points,
                           const Eigen::MatrixXd& momenta, const Kernel& kernel) {
  const int n = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  Derivative out;
  out.d_points = Eigen::MatrixXd::Zero(n, dim);
  out.d_momenta = Eigen::MatrixXd::Zero(n, dim);

  for (int i = 0; i < n; ++i) {
    out.d_points.row(i) += 2.0 * kernel(0.0) * momenta.row(i);
    for (int j = i + 1; j < n; ++j) {
      const Eigen::RowVectorXd diff = points.row(i) - points.row(j);
      const double r = diff.norm();
      const double k = kernel(r);
      out.d_points.row(i) += 2.0 * k * momenta.row(j);
      out.d_points.row(j) += 2.0 * k * momenta.row(i);
      const double uu = momenta.row(i).dot(momenta.row(j));
      const Eigen::RowVectorXd force = 2.0 * uu * kernel.deriv_over_r(r) * diff;
      out.d_momenta.row(i) -= force;
      out.d_momenta.row(j) += force;
    }
  }
  return out;
}

}  // namespace

Trajectory geodesic_shoot(const LandmarkState& initial, const Kernel& kernel,
                          double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ModelError("dt and t_end must be > 0");
  check_distinct(initial.points);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);

  Eigen::MatrixXd p = initial.points;
  Eigen::MatrixXd u = initial.momenta;
  const int steps = static_cast<int>(std::llround(t_end / dt));

  for (int s = 0; s < steps; ++s) {
    const auto k1 = flow_derivative(p, u, kernel);
    const auto k2 = flow_derivative(p + 0.5 * dt * k1.d_points,
                                    u + 0.5 * dt * k1.d_momenta, kernel);
    const auto k3 = flow_derivative(p + 0.5 * dt * k2.d_points,
                                    u + 0.5 * dt * k2.d_momenta, kernel);
    const auto k4 =
        flow_derivative(p + dt * k3.d_points, u + dt * k3.d_momenta, kernel);
    p += dt / 6.0 *
         (k1.d_points + 2.0 * k2.d_points + 2.0 * k3.d_points + k4.d_points);
    u += dt / 6.0 *
         (k1.d_momenta + 2.0 * k2.d_momenta + 2.0 * k3.d_momenta + k4.d_momenta);

    const double t = (s + 1) * dt;
    if (p.rows() > 1 && min_pairwise_distance(p) < kCollisionDistance)
      throw DataError("landmark collision at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.states.push_back({p, u});
  }
  return traj;
}

ShootingResult geodesic_distance(const Eigen::MatrixXd& start,
                                 const Eigen::MatrixXd& target,
                                 const Kernel& kernel, int max_iters, double tol,
                                 double dt) {
  if (start.rows() != target.rows() || start.cols() != target.cols())
    throw ModelError("start and target must have the same landmark layout");
  check_distinct(start);
  check_distinct(target);

  const auto endpoint = [&](const Eigen::MatrixXd& momenta) {
    const Trajectory traj = geodesic_shoot({start, momenta}, kernel, 1.0, dt);
    return traj.states.back().points;
  };
  const auto miss = [&](const Eigen::MatrixXd& momenta) {
    return (endpoint(momenta) - target).squaredNorm();
  };

  // Linearized start: v = 2 K u  =>  u = K^{-1} (target - start) / 2.
  const Eigen::MatrixXd gram = gram_matrix(start, kernel);
  Eigen::MatrixXd momenta = gram.ldlt().solve(target - start) / 2.0;

  ShootingResult result;
  double value = miss(momenta);
  for (int iter = 0; iter < max_iters && value > tol * tol; ++iter) {
    result.iterations = iter + 1;

    Eigen::MatrixXd grad(momenta.rows(), momenta.cols());
    const double h = 1e-6 * std::max(1.0, momenta.cwiseAbs().maxCoeff());
    for (int i = 0; i < momenta.rows(); ++i) {
      for (int d = 0; d < momenta.cols(); ++d) {
        Eigen::MatrixXd probe = momenta;
        probe(i, d) += h;
        const double up = miss(probe);
        probe(i, d) -= 2.0 * h;
        const double down = miss(probe);
        grad(i, d) = (up - down) / (2.0 * h);
      }
    }

    double step = 1.0;
    bool advanced = false;
    while (step > 1e-18) {
      const Eigen::MatrixXd trial = momenta - step * grad;
      const double trial_value = miss(trial);
      if (trial_value < value) {
        momenta = trial;
        value = trial_value;
        advanced = true;
        break;
      }
      step *= 0.5;
    }
    if (!advanced) break;
  }

  result.momentum = momenta;
  result.residual = std::sqrt(value);
  result.matched = result.residual <= tol;
  // Metric length of the unit-time geodesic: sqrt(v0^T G v0) with v0 = 2 K u0,
  // which is 2 sqrt(H).
  const double h_value = kinetic_energy({start, momenta}, kernel);
  result.distance = 2.0 * std::sqrt(std::max(0.0, h_value));
  return result;
}

double ShapeCurve::signed_area() const {
  double acc = 0.0;
  const int n = count();
  for (int i = 0; i < n; ++i) {
    const auto& a = vertices.row(i);
    const auto& b = vertices.row((i + 1) % n);
    acc += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * acc;
}

namespace {

int orientation_sign(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                     const Eigen::RowVector2d& c) {
  const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  if (cross > 0.0) return 1;
  if (cross < 0.0) return -1;
  return 0;
}

bool on_segment(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                const Eigen::RowVector2d& p) {
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
         std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

bool segments_intersect(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                        const Eigen::RowVector2d& c, const Eigen::RowVector2d& d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool ShapeCurve::is_simple() const {
  const int n = count();
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    const Eigen::RowVector2d a = vertices.row(i);
    const Eigen::RowVector2d b = vertices.row((i + 1) % n);
    for (int j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex with edge i.
      if (j == i || (j + 1) % n == i || j == (i + 1) % n) continue;
      const Eigen::RowVector2d c = vertices.row(j);
      const Eigen::RowVector2d d = vertices.row((j + 1) % n);
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

void ShapeCurve::validate() const {
  if (count() < 3) throw ModelError("curve needs at least 3 vertices");
  if (!is_simple()) throw ModelError("curve must be simple");
  if (!is_ccw()) throw ModelError("curve must be counterclockwise");
}

ShapeCurve circle_curve(int num_vertices, double radius, double cx, double cy) {
  ShapeCurve curve;
  curve.vertices.resize(num_vertices, 2);
  for (int i = 0; i < num_vertices; ++i) {
    const double angle = 2.0 * M_PI * i / num_vertices;
    curve.vertices(i, 0) = cx + radius * std::cos(angle);
    curve.vertices(i, 1) = cy + radius * std::sin(angle);
  }
  return curve;
}

WalkResult shape_random_walk(const ShapeCurve& initial, const Kernel& kernel,
                             int num_steps, double step_size,
                             const Eigen::Vector2d& drift, std::uint64_t seed,
                             double dt) {
  initial.validate();
  WalkResult result;
  result.curves.push_back(initial);

  ShapeCurve current = initial;
  for (int step = 0; step < num_steps; ++step) {
    Rng rng(seed, static_cast<std::uint64_t>(step));
    Eigen::MatrixXd momenta(current.count(), 2);
    for (int i = 0; i < current.count(); ++i) {
      momenta(i, 0) = step_size * rng.normal();
      momenta(i, 1) = step_size * rng.normal();
    }

    ShapeCurve next = current;
    if (step_size > 0.0) {
      const Trajectory traj =
          geodesic_shoot({current.vertices, momenta}, kernel, 1.0, dt);
      next.vertices = traj.states.back().points;
    }
    next.vertices.rowwise() += drift.transpose();

    if (!next.is_simple()) {
      result.failed_step = step;
      return result;
    }
    result.curves.push_back(next);
    current = std::move(next);
  }
  result.completed = true;
  return result;
}

ImageGrid render_curves(std::span<const ShapeCurve> curves, const Canvas& canvas) {
  ImageGrid img(canvas.width, canvas.height, 0.0);
  const auto to_px = [&](double x, double y, int& px, int& py) {
    px = static_cast<int>(std::lround((x - canvas.xmin) / (canvas.xmax - canvas.xmin) *
                                      (canvas.width - 1)));
    py = static_cast<int>(std::lround((canvas.ymax - y) / (canvas.ymax - canvas.ymin) *
                                      (canvas.height - 1)));
  };
  const auto plot = [&](int x, int y) {
    if (x >= 0 && x < canvas.width && y >= 0 && y < canvas.height)
      img.at(x, y) = 255.0;
  };

  for (const auto& curve : curves) {
    const int n = curve.count();
    for (int i = 0; i < n; ++i) {
      int x0, y0, x1, y1;
      to_px(curve.vertices(i, 0), curve.vertices(i, 1), x0, y0);
      to_px(curve.vertices((i + 1) % n, 0), curve.vertices((i + 1) % n, 1), x1, y1);
      // Bresenham segment.
      const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
      const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
      int err = dx + dy;
      int x = x0, y = y0;
      for (;;) {
        plot(x, y);
        if (x == x1 && y == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
          err += dy;
          x += sx;
        }
        if (e2 <= dx) {
          err += dx;
          y += sy;
        }
      }
    }
  }
  return img;
}

}  // namespace pt
