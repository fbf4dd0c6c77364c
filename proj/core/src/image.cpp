#include "pt/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pt/errors.hpp"

namespace pt {

double ImageGrid::min_value() const {
  return *std::min_element(data_.begin(), data_.end());
}

double ImageGrid::max_value() const {
  return *std::max_element(data_.begin(), data_.end());
}

double ImageGrid::mean() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s / static_cast<double>(data_.size());
}

double ImageGrid::median() const {
  std::vector<double> sorted(data_);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace {

void write_pgm_bytes(const ImageGrid& img, const std::string& path,
                     const std::string& comment,
                     const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "P5\n";
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << "\n";
  }
  out << img.width() << " " << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

std::uint8_t quantize(double v, double lo, double hi) {
  double t = (v - lo) / (hi - lo) * 255.0;
  t = std::clamp(t, 0.0, 255.0);
  return static_cast<std::uint8_t>(std::lround(t));
}

}  // namespace

void write_pgm(const ImageGrid& img, const std::string& path,
               const std::string& comment) {
  double lo = img.min_value();
  double hi = img.max_value();
  std::vector<std::uint8_t> bytes(img.size());
  if (hi == lo) {
    std::fill(bytes.begin(), bytes.end(), std::uint8_t{0});
  } else {
    for (std::size_t i = 0; i < img.size(); ++i)
      bytes[i] = quantize(img.samples()[i], lo, hi);
  }
  write_pgm_bytes(img, path, comment, bytes);
}

void write_pgm_fixed(const ImageGrid& img, double lo, double hi,
                     const std::string& path, const std::string& comment) {
  if (hi <= lo) throw ModelError("write_pgm_fixed: hi must exceed lo");
  std::vector<std::uint8_t> bytes(img.size());
  for (std::size_t i = 0; i < img.size(); ++i)
    bytes[i] = quantize(img.samples()[i], lo, hi);
  write_pgm_bytes(img, path, comment, bytes);
}

namespace {

int read_pgm_token(std::istream& in) {
  // Whitespace-delimited integer, skipping '#' comment lines.
  for (;;) {
    int c = in.peek();
    if (c == EOF) throw DataError("truncated PGM header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    int value;
    in >> value;
    if (!in) throw DataError("malformed PGM header");
    return value;
  }
}

}  // namespace

ImageGrid read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw DataError("not a binary PGM (P5): " + path);
  const int w = read_pgm_token(in);
  const int h = read_pgm_token(in);
  const int maxval = read_pgm_token(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw DataError("unsupported PGM geometry in " + path);
  in.get();  // single whitespace before raster
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) throw DataError("truncated PGM raster: " + path);
  ImageGrid img(w, h);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.samples()[i] = static_cast<double>(bytes[i]);
  return img;
}

void write_ptf(const ImageGrid& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  const char magic[4] = {'P', 'T', 'F', '1'};
  std::uint32_t header[3] = {static_cast<std::uint32_t>(img.width()),
                             static_cast<std::uint32_t>(img.height()), 0};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(header), 12);
  std::vector<float> row(img.size());
  for (std::size_t i = 0; i < img.size(); ++i)
    row[i] = static_cast<float>(img.samples()[i]);
  out.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  if (!out) throw DataError("write failed: " + path);
}

ImageGrid read_ptf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), 12);
  if (!in || std::memcmp(magic, "PTF1", 4) != 0)
    throw DataError("not a PTF1 raster: " + path);
  const int w = static_cast<int>(header[0]);
  const int h = static_cast<int>(header[1]);
  if (w <= 0 || h <= 0) throw DataError("bad PTF1 geometry in " + path);
  std::vector<float> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!in) throw DataError("truncated PTF1 raster: " + path);
  ImageGrid img(w, h);
  for (std::size_t i = 0; i < raw.size(); ++i)
    img.samples()[i] = static_cast<double>(raw[i]);
  return img;
}

ImageGrid read_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
  if (std::memcmp(magic, "PTF1", 4) == 0) return read_ptf(path);
  throw DataError("unrecognized image format: " + path);
}

}  // namespace pt
