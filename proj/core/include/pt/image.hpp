#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pt {

// Row-major 2D raster of doubles. Shared by the field, statistics and
// synthesis code; (0,0) is the top-left sample.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& samples() { return data_; }
  const std::vector<double>& samples() const { return data_; }

  double min_value() const;
  double max_value() const;
  double mean() const;
  double median() const;

  // Sample pitch in world units per pixel; purely informational.
  double pitch = 1.0;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// 8-bit binary PGM (P5). `comment` lines are embedded after the magic so a
// written artifact records how it was produced.
void write_pgm(const ImageGrid& img, const std::string& path,
               const std::string& comment = "");
// Fixed affine quantization: lo -> 0, hi -> 255, clamped.
void write_pgm_fixed(const ImageGrid& img, double lo, double hi,
                     const std::string& path, const std::string& comment = "");
ImageGrid read_pgm(const std::string& path);

// Lossless float sidecar: 16-byte header ("PTF1", u32 width, u32 height,
// u32 reserved), then width*height little-endian float32 samples.
void write_ptf(const ImageGrid& img, const std::string& path);
ImageGrid read_ptf(const std::string& path);

// Reads either format, keyed on the file magic.
ImageGrid read_image(const std::string& path);

}  // namespace pt
