#include "pt/image_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pt/errors.hpp"
#include "pt/fft.hpp"

namespace pt {

double kurtosis(std::span<const double> samples) {
  if (samples.size() < 4) throw DataError("kurtosis needs >= 4 samples");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) throw DataError("kurtosis undefined for zero variance");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) throw DataError("kurtosis undefined for zero variance");
  return m4 / (m2 * m2);
}

SpectralFit power_spectrum_slope(const ImageGrid& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 32 || h < 32) throw ModelError("spectrum needs at least 32x32");
  if (img.max_value() == img.min_value())
    throw DataError("constant image has no spectrum");

  // Mean-subtract and Hann-window, then zero-pad to powers of two.
  const double mean = img.mean();
  const int pw = next_power_of_two(w);
  const int ph = next_power_of_two(h);
  ImageGrid padded(pw, ph, 0.0);
  for (int y = 0; y < h; ++y) {
    const double wy = 0.5 * (1.0 - std::cos(2.0 * M_PI * y / (h - 1)));
    for (int x = 0; x < w; ++x) {
      const double wx = 0.5 * (1.0 - std::cos(2.0 * M_PI * x / (w - 1)));
      padded.at(x, y) = (img.at(x, y) - mean) * wx * wy;
    }
  }

  const auto spectrum = fft_2d(padded);
  const int min_dim = std::min(w, h);
  const int r_max = min_dim / 2;

  // Radial average with integer bins in units of the smaller dimension.
  std::vector<double> power_sum(r_max + 1, 0.0);
  std::vector<long> counts(r_max + 1, 0);
  for (int y = 0; y < ph; ++y) {
    const int ky = y <= ph / 2 ? y : y - ph;
    for (int x = 0; x < pw; ++x) {
      const int kx = x <= pw / 2 ? x : x - pw;
      const double fx = static_cast<double>(kx) / pw;
      const double fy = static_cast<double>(ky) / ph;
      const int bin = static_cast<int>(std::lround(std::sqrt(fx * fx + fy * fy) * min_dim));
      if (bin < 1 || bin > r_max) continue;
      const auto& c = spectrum[static_cast<std::size_t>(y) * pw + x];
      power_sum[bin] += std::norm(c);
      ++counts[bin];
    }
  }

  SpectralFit fit;
  for (int r = 1; r <= r_max; ++r) {
    if (counts[r] == 0) continue;
    fit.freq.push_back(static_cast<double>(r));
    fit.power.push_back(power_sum[r] / counts[r]);
  }

  // Middle frequency decade: one decade geometrically centered in [1, r_max].
  const double r_mid = std::sqrt(static_cast<double>(r_max));
  const double lo = r_mid / std::sqrt(10.0);
  const double hi = r_mid * std::sqrt(10.0);

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long m = 0;
  for (std::size_t i = 0; i < fit.freq.size(); ++i) {
    if (fit.freq[i] < lo || fit.freq[i] > hi || fit.power[i] <= 0.0) continue;
    const double lx = std::log(fit.freq[i]);
    const double ly = std::log(fit.power[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 3) throw DataError("too few usable frequency bins for a slope fit");
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  fit.lambda = -slope;

  double ss = 0.0;
  for (std::size_t i = 0; i < fit.freq.size(); ++i) {
    if (fit.freq[i] < lo || fit.freq[i] > hi || fit.power[i] <= 0.0) continue;
    const double res = std::log(fit.power[i]) - (intercept + slope * std::log(fit.freq[i]));
    ss += res * res;
  }
  fit.residual = std::sqrt(ss / m);
  fit.high_residual = fit.residual > 1.0;
  return fit;
}

ImageGrid block_renormalize(const ImageGrid& img) {
  if (img.width() % 2 != 0 || img.height() % 2 != 0)
    throw DataError("block_renormalize needs even dimensions");
  ImageGrid half(img.width() / 2, img.height() / 2);
  for (int y = 0; y < half.height(); ++y)
    for (int x = 0; x < half.width(); ++x)
      half.at(x, y) = (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) +
                       img.at(2 * x, 2 * y + 1) + img.at(2 * x + 1, 2 * y + 1)) /
                      4.0;
  return half;
}

std::vector<double> horizontal_diff(const ImageGrid& img) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(img.width() - 1) * img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x + 1 < img.width(); ++x)
      out.push_back(img.at(x + 1, y) - img.at(x, y));
  return out;
}

const std::vector<Filter3>& standard_filter_bank() {
  static const std::vector<Filter3> bank = {
      {"dx", {0, 0, 0, -1, 1, 0, 0, 0, 0}},
      {"dy", {0, -1, 0, 0, 1, 0, 0, 0, 0}},
      {"diag", {-1, 0, 0, 0, 1, 0, 0, 0, 0}},
      {"antidiag", {0, 0, -1, 0, 1, 0, 0, 0, 0}},
      {"laplacian", {0, 1, 0, 1, -4, 1, 0, 1, 0}},
      {"center_surround", {-1, -1, -1, -1, 8, -1, -1, -1, -1}},
  };
  return bank;
}

std::vector<double> filter_response(const ImageGrid& img, const Filter3& filter) {
  std::vector<double> out;
  if (img.width() < 3 || img.height() < 3) return out;
  out.reserve(static_cast<std::size_t>(img.width() - 2) * (img.height() - 2));
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          acc += filter.taps[(dy + 1) * 3 + (dx + 1)] * img.at(x + dx, y + dy);
      out.push_back(acc);
    }
  }
  return out;
}

HistogramShape zero_peak_shape(std::span<const double> samples, int bins,
                               double range) {
  if (bins < 3 || bins % 2 == 0) throw ModelError("bins must be odd and >= 3");
  if (samples.empty()) throw DataError("no samples");
  if (range <= 0.0) {
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples.size());
    range = 4.0 * std::sqrt(var);
    if (range <= 0.0) throw DataError("zero-variance samples");
  }

  std::vector<double> hist(bins, 0.0);
  const double width = 2.0 * range / bins;
  long used = 0;
  for (double x : samples) {
    if (x < -range || x >= range) continue;
    const int b = static_cast<int>((x + range) / width);
    hist[std::clamp(b, 0, bins - 1)] += 1.0;
    ++used;
  }
  if (used == 0) throw DataError("all samples outside histogram range");
  for (double& v : hist) v /= static_cast<double>(used);

  HistogramShape shape;
  const int center = bins / 2;
  shape.center_mass = hist[center];
  shape.neighbor_mass = 0.5 * (hist[center - 1] + hist[center + 1]);
  shape.center_ratio = shape.neighbor_mass > 0.0
                           ? shape.center_mass / shape.neighbor_mass
                           : std::numeric_limits<double>::infinity();
  return shape;
}

}  // namespace pt
