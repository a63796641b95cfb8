#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "igmseg/grid.hpp"

using namespace igmseg;

namespace {

// Independent brute-force band oracle: disc membership by direct distance
// enumeration over all pixel pairs.
PixelMask band_oracle(const PixelMask& mask, double d) {
  const double r = std::max(d, 1.5);
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());
  PixelMask out = PixelMask::Constant(rows, cols, false);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      bool in = false, notin = false;
      for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) {
          const double dist = std::hypot(a - i, b - j);
          if (dist < r) (mask(a, b) ? in : notin) = true;
        }
      out(i, j) = in && notin;
    }
  return out;
}

PixelMask random_mask(int rows, int cols, std::mt19937_64& rng) {
  PixelMask m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = (rng() & 1) != 0;
  return m;
}

}  // namespace

TEST_CASE("pixel_index basics") {
  CHECK(pixel_index(0, 0, 7) == 0);
  CHECK(pixel_index(1, 0, 5) == 5);
  CHECK(pixel_index(2, 3, 5) == 13);
  CHECK_THROWS(pixel_index(0, 5, 5));
  CHECK_THROWS(pixel_index(-1, 0, 5));
}

TEST_CASE("pixel_index round trip") {
  const int width = 13;
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const int r = static_cast<int>(rng() % 50);
    const int c = static_cast<int>(rng() % width);
    const auto idx = pixel_index(r, c, width);
    CHECK(idx / width == r);
    CHECK(idx % width == c);
  }
}

TEST_CASE("boundary band: half split") {
  PixelMask m = PixelMask::Constant(4, 4, false);
  m.leftCols(2).setConstant(true);
  const PixelMask band = mask_boundary_band(m, 1.0);
  CHECK((band == band_oracle(m, 1.0)).all());
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(band(r, c) == (c == 1 || c == 2));
}

TEST_CASE("boundary band: full mask is empty") {
  const PixelMask m = PixelMask::Constant(4, 5, true);
  CHECK(mask_boundary_band(m, 2.0).count() == 0);
  CHECK(mask_boundary_band(!m, 2.0).count() == 0);
}

TEST_CASE("boundary band: single pixel matches the disc oracle") {
  PixelMask m = PixelMask::Constant(5, 5, false);
  m(2, 2) = true;
  const PixelMask band = mask_boundary_band(m, 1.0);
  CHECK((band == band_oracle(m, 1.0)).all());
  // The pixel itself and its 4-neighbors are in the band.
  CHECK(band(2, 2));
  CHECK(band(1, 2));
  CHECK(band(3, 2));
  CHECK(band(2, 1));
  CHECK(band(2, 3));
  CHECK_FALSE(band(0, 0));
}

TEST_CASE("boundary band: complement symmetry and monotonicity in d") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PixelMask m = random_mask(9, 8, rng);
    const PixelMask b1 = mask_boundary_band(m, 1.0);
    CHECK((b1 == mask_boundary_band(!m, 1.0)).all());
    const PixelMask b2 = mask_boundary_band(m, 2.5);
    const PixelMask b3 = mask_boundary_band(m, 4.0);
    CHECK((b1 && !b2).count() == 0);  // b1 subset of b2
    CHECK((b2 && !b3).count() == 0);
  }
}

TEST_CASE("boundary band agrees with the oracle on random masks") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const PixelMask m = random_mask(7, 9, rng);
    for (const double d : {1.0, 2.0, 3.3})
      CHECK((mask_boundary_band(m, d) == band_oracle(m, d)).all());
  }
}

TEST_CASE("pgm round trip 8 and 16 bit") {
  const auto dir = std::filesystem::temp_directory_path();
  Image img(3, 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) img(r, c) = (r * 4 + c) / 11.0;

  const std::string p8 = (dir / "igmseg_t8.pgm").string();
  write_pgm(p8, img, 255);
  const Image back8 = read_pgm(p8);
  CHECK((back8 - img).abs().maxCoeff() <= 0.5 / 255 + 1e-12);

  const std::string p16 = (dir / "igmseg_t16.pgm").string();
  write_pgm(p16, img, 65535);
  const Image back16 = read_pgm(p16);
  CHECK((back16 - img).abs().maxCoeff() <= 0.5 / 65535 + 1e-12);

  std::filesystem::remove(p8);
  std::filesystem::remove(p16);
}

TEST_CASE("label pgm stores labels verbatim") {
  const auto dir = std::filesystem::temp_directory_path();
  LabelMap labels(2, 3);
  labels << 0, 1, 500, 65535, 2, 2;
  const std::string path = (dir / "igmseg_lbl.pgm").string();
  write_label_pgm(path, labels);
  const LabelMap back = read_label_pgm(path);
  CHECK((back == labels).all());
  std::filesystem::remove(path);
}

TEST_CASE("image validation rejects non-finite values") {
  Image img = Image::Zero(2, 2);
  img(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(validate_image(img));
}
