#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "pt/image.hpp"

namespace pt {

// Fourth central moment over squared variance (3 for a Gaussian, not the
// excess form). Needs >= 4 samples and nonzero variance.
double kurtosis(std::span<const double> samples);

struct SpectralFit {
  std::vector<double> freq;    // radial bin centers, cycles relative to min dim
  std::vector<double> power;   // mean periodogram per bin
  double lambda = 0.0;         // power ~ freq^-lambda over the fitted band
  double residual = 0.0;       // rms log-residual of the fit
  bool high_residual = false;  // fit rejected (spectrum is not a power law)
};

// Radially averaged periodogram of the Hann-windowed, mean-subtracted image
// and a least-squares log-log slope over the middle frequency decade.
// Requires at least 32x32 input; throws DataError on a constant image.
SpectralFit power_spectrum_slope(const ImageGrid& img);

// Exact 2x2 block means; throws DataError on odd dimensions.
ImageGrid block_renormalize(const ImageGrid& img);

// Horizontal first differences s(x+1,y) - s(x,y); the basic derivative
// statistic used by the heavy-tail probes.
std::vector<double> horizontal_diff(const ImageGrid& img);

struct Filter3 {
  std::string name;
  std::array<double, 9> taps;  // row-major 3x3, zero mean
};

// Small bank of zero-mean 3x3 filters (derivatives, diagonals, Laplacian,
// center-surround).
const std::vector<Filter3>& standard_filter_bank();

// Valid-region responses (no border padding).
std::vector<double> filter_response(const ImageGrid& img, const Filter3& filter);

struct HistogramShape {
  double center_mass = 0.0;    // mass of the bin containing 0
  double neighbor_mass = 0.0;  // mean mass of the two flanking bins
  double center_ratio = 0.0;   // center over neighbors
};

// Odd-bin histogram over [-range, range] summarizing how peaked a marginal
// is at zero; `range` defaults to 4 standard deviations.
HistogramShape zero_peak_shape(std::span<const double> samples, int bins = 41,
                               double range = 0.0);

}  // namespace pt
