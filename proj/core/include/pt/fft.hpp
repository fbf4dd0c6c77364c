#pragma once

#include <complex>
#include <vector>

#include "pt/image.hpp"

namespace pt {

// In-place iterative radix-2 transform; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false);

// 2D transform of a real raster (rows then columns). Dimensions must be
// powers of two; callers pad beforehand.
std::vector<std::complex<double>> fft_2d(const ImageGrid& img);

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
int next_power_of_two(int n);

}  // namespace pt
