#pragma once

#include <vector>

#include "pt/image.hpp"

namespace pt {

struct DiffusionResult {
  ImageGrid image;
  std::vector<double> energy_trace;  // num_steps + 1 values, non-increasing
};

// Discrete energy sum sqrt(|grad J|^2 + eps^2) + (lambda/2) sum (I - J)^2
// with forward differences and Neumann boundaries.
double diffusion_energy(const ImageGrid& current, const ImageGrid& reference,
                        double lambda, double epsilon);

// Explicit curvature-flow restoration dJ/dt = div(grad J / |grad J|_eps)
// + lambda (I - J), run as gradient descent on the discrete energy so the
// trace is monotone. Stability requires dt <= 0.2 * eps (unit grid spacing)
// and dt * lambda <= 1; violations throw ModelError before any stepping.
DiffusionResult diffuse(const ImageGrid& image, double lambda, int num_steps,
                        double dt, double epsilon);

}  // namespace pt
