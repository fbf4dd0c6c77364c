#include "pt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "pt/errors.hpp"
#include "pt/rng.hpp"

namespace pt {

void WaveletProcessSpec::validate() const {
  if (intensity < 0.0) throw ModelError("intensity must be >= 0");
  if (!(log_scale_max > log_scale_min))
    throw ModelError("log-scale range is empty");
  if (base_width <= 0.0 || aspect <= 0.0 || pareto_scale <= 0.0 ||
      pareto_alpha <= 0.0)
    throw ModelError("invalid primitive family parameters");
}

void render_wavelet_primitive(ImageGrid& img, const WaveletPrimitive& bump) {
  const double reach = 3.5 * bump.width;  // beyond this the bump is negligible
  const int x0 = std::max(0, static_cast<int>(std::floor(bump.x - reach)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(bump.x + reach)));
  const int y0 = std::max(0, static_cast<int>(std::floor(bump.y - reach)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(bump.y + reach)));
  const double c = std::cos(bump.orientation);
  const double s = std::sin(bump.orientation);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - bump.x;
      const double dy = y - bump.y;
      const double u = (c * dx + s * dy) / bump.width;
      const double v = (-s * dx + c * dy) * bump.aspect / bump.width;
      img.at(x, y) += bump.amplitude * std::exp(-0.5 * (u * u + v * v));
    }
  }
}

ImageGrid synth_random_wavelets(const WaveletProcessSpec& spec, int size,
                                std::uint64_t seed) {
  spec.validate();
  if (size < 1) throw ModelError("size must be >= 1");

  const double max_width = spec.base_width * std::exp(-spec.log_scale_min);
  const int pad = static_cast<int>(std::ceil(3.5 * max_width));
  const double area = static_cast<double>(size + 2 * pad) * (size + 2 * pad);
  const double mean_count =
      spec.intensity * area * (spec.log_scale_max - spec.log_scale_min);

  Rng rng(seed);
  const long count = rng.poisson(mean_count);

  ImageGrid img(size, size, 0.0);
  for (long i = 0; i < count; ++i) {
    WaveletPrimitive bump;
    bump.x = rng.uniform(-static_cast<double>(pad), size + static_cast<double>(pad));
    bump.y = rng.uniform(-static_cast<double>(pad), size + static_cast<double>(pad));
    const double log_scale = rng.uniform(spec.log_scale_min, spec.log_scale_max);
    bump.width = spec.base_width * std::exp(-log_scale);
    bump.orientation = rng.uniform(0.0, M_PI);
    bump.aspect = spec.aspect;
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double tail = std::pow(1.0 - rng.uniform(), -1.0 / spec.pareto_alpha);
    bump.amplitude = sign * spec.pareto_scale * tail;
    render_wavelet_primitive(img, bump);
  }

  const double mean = img.mean();
  for (double& v : img.samples()) v -= mean;
  return img;
}

void DeadLeavesSpec::validate() const {
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw ModelError("radius range must satisfy 0 < r_min < r_max");
  if (leaves_per_area <= 0.0) throw ModelError("leaves_per_area must be > 0");
  if (!(gray_max >= gray_min)) throw ModelError("empty gray-level range");
}

double DeadLeavesSpec::mean_radius_sq() const {
  // Density proportional to r^-a on [r_min, r_max].
  const double a = radius_exponent;
  auto moment = [&](double p) {  // integral of r^(p-a) dr
    const double e = p - a + 1.0;
    if (std::abs(e) < 1e-12) return std::log(r_max / r_min);
    return (std::pow(r_max, e) - std::pow(r_min, e)) / e;
  };
  return moment(2.0) / moment(0.0);
}

double DeadLeavesSpec::expected_pixel_coverage() const {
  return leaves_per_area * M_PI * mean_radius_sq();
}

DeadLeavesResult render_dead_leaves(std::span<const Leaf> leaves, int size,
                                    double background) {
  DeadLeavesResult out;
  out.image = ImageGrid(size, size, background);

  // Paint front to back; the first disk to claim a pixel wins.
  std::vector<std::size_t> order(leaves.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (leaves[a].depth != leaves[b].depth) return leaves[a].depth < leaves[b].depth;
    return a < b;
  });

  std::vector<std::uint8_t> covered(out.image.size(), 0);
  std::size_t remaining = out.image.size();
  for (std::size_t idx : order) {
    if (remaining == 0) break;
    const Leaf& leaf = leaves[idx];
    const int x0 = std::max(0, static_cast<int>(std::floor(leaf.x - leaf.r)));
    const int x1 = std::min(size - 1, static_cast<int>(std::ceil(leaf.x + leaf.r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(leaf.y - leaf.r)));
    const int y1 = std::min(size - 1, static_cast<int>(std::ceil(leaf.y + leaf.r)));
    const double r2 = leaf.r * leaf.r;
    for (int y = y0; y <= y1; ++y) {
      const double dy = y - leaf.y;
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - leaf.x;
        if (dx * dx + dy * dy > r2) continue;
        const std::size_t i = static_cast<std::size_t>(y) * size + x;
        if (covered[i]) continue;
        covered[i] = 1;
        out.image.samples()[i] = leaf.gray;
        --remaining;
      }
    }
  }
  out.uncovered = static_cast<long>(remaining);
  return out;
}

DeadLeavesResult synth_dead_leaves(const DeadLeavesSpec& spec, int size,
                                   std::uint64_t seed) {
  spec.validate();
  if (size < 1) throw ModelError("size must be >= 1");

  const double coverage = spec.expected_pixel_coverage();
  const double needed = std::log(1000.0);  // e^-coverage <= 0.1% uncovered
  if (coverage < needed) {
    const double required_rate = needed / (M_PI * spec.mean_radius_sq());
    throw ModelError(
        "dead-leaves coverage too thin: expected " + std::to_string(coverage) +
        " covering disks per pixel; need leaves_per_area >= " +
        std::to_string(required_rate));
  }

  const double pad = spec.r_max;
  const double lo = -pad;
  const double hi = size + pad;
  const double mean_count = spec.leaves_per_area * (hi - lo) * (hi - lo);

  Rng rng(seed);
  const long count = rng.poisson(mean_count);

  // Inverse-CDF sampling of the power-law radius.
  const double a = spec.radius_exponent;
  const double e = 1.0 - a;
  std::vector<Leaf> leaves(count);
  for (long i = 0; i < count; ++i) {
    Leaf& leaf = leaves[i];
    leaf.x = rng.uniform(lo, hi);
    leaf.y = rng.uniform(lo, hi);
    const double u = rng.uniform();
    if (std::abs(e) < 1e-12) {
      leaf.r = spec.r_min * std::pow(spec.r_max / spec.r_min, u);
    } else {
      const double lo_p = std::pow(spec.r_min, e);
      const double hi_p = std::pow(spec.r_max, e);
      leaf.r = std::pow(lo_p + u * (hi_p - lo_p), 1.0 / e);
    }
    leaf.depth = rng.uniform();
    leaf.gray = rng.uniform(spec.gray_min, spec.gray_max);
  }
  return render_dead_leaves(leaves, size, spec.background);
}

}  // namespace pt
