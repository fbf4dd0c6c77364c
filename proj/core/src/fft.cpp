#include "pt/fft.hpp"

#include <cmath>

#include "pt/errors.hpp"

namespace pt {

int next_power_of_two(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(static_cast<int>(n)))
    throw ModelError("fft: length must be a power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> root(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> even = data[i + k];
        const std::complex<double> odd = data[i + k + len / 2] * w;
        data[i + k] = even + odd;
        data[i + k + len / 2] = even - odd;
        w *= root;
      }
    }
  }
  if (inverse)
    for (auto& v : data) v /= static_cast<double>(n);
}

std::vector<std::complex<double>> fft_2d(const ImageGrid& img) {
  const int w = img.width();
  const int h = img.height();
  if (!is_power_of_two(w) || !is_power_of_two(h))
    throw ModelError("fft_2d: dimensions must be powers of two");

  std::vector<std::complex<double>> data(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = img.samples()[i];

  std::vector<std::complex<double>> line(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) line[x] = data[static_cast<std::size_t>(y) * w + x];
    fft_inplace(line);
    for (int x = 0; x < w; ++x) data[static_cast<std::size_t>(y) * w + x] = line[x];
  }
  line.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) line[y] = data[static_cast<std::size_t>(y) * w + x];
    fft_inplace(line);
    for (int y = 0; y < h; ++y) data[static_cast<std::size_t>(y) * w + x] = line[y];
  }
  return data;
}

}  // namespace pt
