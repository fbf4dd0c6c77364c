#include "pt/diffusion.hpp"

#include <cmath>

#include "pt/errors.hpp"

namespace pt {

namespace {

// Forward differences with Neumann boundaries (zero at the far edge).
inline double grad_x(const ImageGrid& img, int x, int y) {
  return x + 1 < img.width() ? img.at(x + 1, y) - img.at(x, y) : 0.0;
}

inline double grad_y(const ImageGrid& img, int x, int y) {
  return y + 1 < img.height() ? img.at(x, y + 1) - img.at(x, y) : 0.0;
}

}  // namespace

double diffusion_energy(const ImageGrid& current, const ImageGrid& reference,
                        double lambda, double epsilon) {
  double energy = 0.0;
  for (int y = 0; y < current.height(); ++y) {
    for (int x = 0; x < current.width(); ++x) {
      const double gx = grad_x(current, x, y);
      const double gy = grad_y(current, x, y);
      energy += std::sqrt(gx * gx + gy * gy + epsilon * epsilon);
      const double d = reference.at(x, y) - current.at(x, y);
      energy += 0.5 * lambda * d * d;
    }
  }
  return energy;
}

DiffusionResult diffuse(const ImageGrid& image, double lambda, int num_steps,
                        double dt, double epsilon) {
  if (!(epsilon > 0.0)) throw ModelError("epsilon must be > 0");
  if (lambda < 0.0) throw ModelError("lambda must be >= 0");
  if (num_steps < 0) throw ModelError("num_steps must be >= 0");
  if (dt > 0.2 * epsilon)
    throw ModelError("unstable step: dt must satisfy dt <= 0.2 * epsilon");
  if (dt * lambda > 1.0)
    throw ModelError("unstable step: dt * lambda must not exceed 1");

  const int w = image.width();
  const int h = image.height();
  DiffusionResult result;
  result.image = image;
  result.energy_trace.reserve(num_steps + 1);
  result.energy_trace.push_back(diffusion_energy(result.image, image, lambda, epsilon));

  ImageGrid px(w, h), py(w, h);
  for (int step = 0; step < num_steps; ++step) {
    ImageGrid& current = result.image;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double gx = grad_x(current, x, y);
        const double gy = grad_y(current, x, y);
        const double mag = std::sqrt(gx * gx + gy * gy + epsilon * epsilon);
        px.at(x, y) = gx / mag;
        py.at(x, y) = gy / mag;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double div = px.at(x, y) - (x > 0 ? px.at(x - 1, y) : 0.0) +
                           py.at(x, y) - (y > 0 ? py.at(x, y - 1) : 0.0);
        current.at(x, y) += dt * (div + lambda * (image.at(x, y) - current.at(x, y)));
      }
    }
    result.energy_trace.push_back(diffusion_energy(current, image, lambda, epsilon));
  }
  return result;
}

}  // namespace pt
