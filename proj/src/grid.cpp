#include "igmseg/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace igmseg {

std::int64_t pixel_index(int row, int col, int width) {
  if (width < 1) throw std::invalid_argument("pixel_index: width < 1");
  if (row < 0 || col < 0 || col >= width)
    throw std::out_of_range("pixel_index: coordinates out of range");
  return static_cast<std::int64_t>(row) * width + col;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate_image(const Image& img) {
  if (img.rows() < 1 || img.cols() < 1)
    throw std::invalid_argument("image: empty");
  if (!img.isFinite().all())
    throw std::invalid_argument("image: non-finite intensity");
}

namespace {

// Integer offsets strictly inside the radius-d disc (d clamped to 1.5).
std::vector<Offset> disc_offsets(double d) {
  const double r = std::max(d, 1.5);
  const double r2 = r * r;
  const int lim = static_cast<int>(std::ceil(r));
  std::vector<Offset> out;
  for (int dy = -lim; dy <= lim; ++dy)
    for (int dx = -lim; dx <= lim; ++dx)
      if (dy * dy + dx * dx < r2) out.push_back({dy, dx});
  return out;
}

}  // namespace

PixelMask mask_boundary_band(const PixelMask& mask, double d,
                             const PixelMask& region) {
  if (d < 1.0) throw std::invalid_argument("mask_boundary_band: d < 1");
  if (mask.rows() != region.rows() || mask.cols() != region.cols())
    throw std::invalid_argument("mask_boundary_band: shape mismatch");
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());
  const auto offs = disc_offsets(d);
  PixelMask band = PixelMask::Constant(rows, cols, false);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!region(r, c)) continue;
      bool in = false, out = false;
      for (const auto& o : offs) {
        const int rr = r + o.dy, cc = c + o.dx;
        if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        if (!region(rr, cc)) continue;
        (mask(rr, cc) ? in : out) = true;
        if (in && out) break;
      }
      band(r, c) = in && out;
    }
  }
  return band;
}

PixelMask mask_boundary_band(const PixelMask& mask, double d) {
  const PixelMask all =
      PixelMask::Constant(mask.rows(), mask.cols(), true);
  return mask_boundary_band(mask, d, all);
}

std::vector<Pixel> mask_pixels(const PixelMask& mask) {
  std::vector<Pixel> out;
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      if (mask(r, c)) out.push_back({r, c});
  return out;
}

namespace {

int pgm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then reads one unsigned integer.
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  if (ch == EOF || !std::isdigit(ch)) throw std::runtime_error("pgm: malformed header");
  int value = 0;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    ch = in.get();
  }
  return value;
}

struct PgmRaw {
  int rows, cols, maxval;
  std::vector<std::uint16_t> data;  // row-major
};

PgmRaw read_pgm_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw std::runtime_error("pgm: not a P5 file: " + path);
  PgmRaw raw;
  raw.cols = pgm_token(in);
  raw.rows = pgm_token(in);
  raw.maxval = pgm_token(in);
  if (raw.maxval < 1 || raw.maxval > 65535)
    throw std::runtime_error("pgm: bad maxval in " + path);
  const std::size_t n = static_cast<std::size_t>(raw.rows) * raw.cols;
  raw.data.resize(n);
  if (raw.maxval <= 255) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("pgm: truncated data in " + path);
    for (std::size_t i = 0; i < n; ++i) raw.data[i] = buf[i];
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (!in) throw std::runtime_error("pgm: truncated data in " + path);
    for (std::size_t i = 0; i < n; ++i)
      raw.data[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  return raw;
}

void write_pgm_raw(const std::string& path, int rows, int cols, int maxval,
                   const std::vector<std::uint16_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path);
  out << "P5\n" << cols << " " << rows << "\n" << maxval << "\n";
  if (maxval <= 255) {
    std::vector<unsigned char> buf(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      buf[i] = static_cast<unsigned char>(data[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  } else {
    std::vector<unsigned char> buf(2 * data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      buf[2 * i] = static_cast<unsigned char>(data[i] >> 8);
      buf[2 * i + 1] = static_cast<unsigned char>(data[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

}  // namespace

Image read_pgm(const std::string& path) {
  const PgmRaw raw = read_pgm_raw(path);
  Image img(raw.rows, raw.cols);
  for (int r = 0; r < raw.rows; ++r)
    for (int c = 0; c < raw.cols; ++c)
      img(r, c) = raw.data[static_cast<std::size_t>(r) * raw.cols + c] /
                  static_cast<double>(raw.maxval);
  return img;
}

void write_pgm(const std::string& path, const Image& img, int maxval) {
  validate_image(img);
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("pgm: maxval must be 255 or 65535");
  const int rows = static_cast<int>(img.rows());
  const int cols = static_cast<int>(img.cols());
  std::vector<std::uint16_t> data(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double v = std::clamp(img(r, c), 0.0, 1.0);
      data[static_cast<std::size_t>(r) * cols + c] =
          static_cast<std::uint16_t>(std::lround(v * maxval));
    }
  write_pgm_raw(path, rows, cols, maxval, data);
}

LabelMap read_label_pgm(const std::string& path) {
  const PgmRaw raw = read_pgm_raw(path);
  LabelMap labels(raw.rows, raw.cols);
  for (int r = 0; r < raw.rows; ++r)
    for (int c = 0; c < raw.cols; ++c)
      labels(r, c) = raw.data[static_cast<std::size_t>(r) * raw.cols + c];
  return labels;
}

void write_label_pgm(const std::string& path, const LabelMap& labels) {
  const int rows = static_cast<int>(labels.rows());
  const int cols = static_cast<int>(labels.cols());
  std::vector<std::uint16_t> data(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = labels(r, c);
      if (v < 0 || v > 65535)
        throw std::invalid_argument("label pgm: label out of 16-bit range");
      data[static_cast<std::size_t>(r) * cols + c] = static_cast<std::uint16_t>(v);
    }
  write_pgm_raw(path, rows, cols, 65535, data);
}

}  // namespace igmseg
