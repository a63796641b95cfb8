#ifndef IGMSEG_GRID_HPP
#define IGMSEG_GRID_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace igmseg {

// 2-D grayscale intensity grid, nominal range [0,1], indexed (row, col).
using Image = Eigen::ArrayXXd;
// Boolean pixel mask; true = member of M.
using PixelMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
// Instance labeling; 0 is background.
using LabelMap = Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic>;

struct Offset {
  int dy = 0;
  int dx = 0;
  bool operator==(const Offset&) const = default;
};

struct Pixel {
  int row = 0;
  int col = 0;
  bool operator==(const Pixel&) const = default;
};

// Row-major linear index. Throws on out-of-range coordinates.
std::int64_t pixel_index(int row, int col, int width);

// splitmix64-style seed combinator for deriving independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

void validate_image(const Image& img);

// Band N(M, d): pixels whose Euclidean disc of radius d intersects both M
// and its complement. Radii below 1.5 are clamped to 1.5 so that the
// 4-neighborhood participates at d = 1.
PixelMask mask_boundary_band(const PixelMask& mask, double d);

// Region-restricted variant: only pixels inside `region` can be band members
// and the complement is taken within `region`.
PixelMask mask_boundary_band(const PixelMask& mask, double d,
                             const PixelMask& region);

std::vector<Pixel> mask_pixels(const PixelMask& mask);

// PGM "P5" I/O. Intensities map to [0,1] via maxval; 16-bit files are
// big-endian per the Netpbm convention.
Image read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Image& img, int maxval = 255);

// LabelMap I/O: P5 with maxval 65535, label values stored verbatim.
LabelMap read_label_pgm(const std::string& path);
void write_label_pgm(const std::string& path, const LabelMap& labels);

}  // namespace igmseg

#endif
