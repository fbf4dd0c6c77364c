#pragma once

#include <cstdint>
#include <span>

#include "pt/image.hpp"

namespace pt {

// Additive model: Poisson-placed oriented bumps across a log-scale range,
// amplitudes from a symmetric Pareto law (heavy-tailed). The image is
// mean-subtracted, so it is only defined up to a constant.
struct WaveletProcessSpec {
  double intensity = 0.02;      // expected bumps per pixel area per log-scale unit
  double log_scale_min = 0.0;   // bump width = base_width * exp(-r)
  double log_scale_max = 3.0;
  double base_width = 24.0;     // width at log-scale 0, in pixels
  double aspect = 3.0;          // anisotropy of the bump
  double pareto_alpha = 3.0;    // amplitude tail index
  double pareto_scale = 1.0;

  void validate() const;
};

struct WaveletPrimitive {
  double x = 0.0;
  double y = 0.0;
  double width = 1.0;
  double orientation = 0.0;
  double amplitude = 1.0;
  double aspect = 1.0;
};

// Adds one oriented Gaussian bump into the image.
void render_wavelet_primitive(ImageGrid& img, const WaveletPrimitive& bump);

ImageGrid synth_random_wavelets(const WaveletProcessSpec& spec, int size,
                                std::uint64_t seed);

// Occlusion model: uniformly placed disks with power-law radii and
// independent uniform depths; each pixel shows the front-most covering disk.
struct DeadLeavesSpec {
  double radius_exponent = 3.0;  // radius density proportional to r^-exponent
  double r_min = 0.5;            // below pixel scale, so the lattice sets the cutoff
  double r_max = 64.0;
  double leaves_per_area = 1.0;  // expected disk centers per pixel area
  double gray_min = 0.0;
  double gray_max = 1.0;
  double background = 0.5;       // value of pixels no disk covers

  void validate() const;
  // Expected number of disks covering a fixed pixel.
  double expected_pixel_coverage() const;
  double mean_radius_sq() const;
};

struct Leaf {
  double x = 0.0;
  double y = 0.0;
  double r = 1.0;
  double depth = 0.0;  // smaller is nearer
  double gray = 0.0;
};

struct DeadLeavesResult {
  ImageGrid image;
  long uncovered = 0;
};

// Deterministic renderer used by the sampler and directly by tests.
DeadLeavesResult render_dead_leaves(std::span<const Leaf> leaves, int size,
                                    double background);

// Throws ModelError (naming the required rate) if the spec's expected
// coverage leaves more than 0.1% of pixels empty.
DeadLeavesResult synth_dead_leaves(const DeadLeavesSpec& spec, int size,
                                   std::uint64_t seed);

}  // namespace pt
