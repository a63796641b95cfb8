#include "igmseg/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace igmseg {

namespace {

struct Blob {
  double cy, cx;      // center
  double a, b;        // semi-axes
  double p;           // superellipse exponent
  double theta;       // rotation
  std::vector<Pixel> pixels;
};

void rasterize(Blob& blob, int rows, int cols) {
  blob.pixels.clear();
  const double reach = std::max(blob.a, blob.b) + 1.0;
  const int r0 = std::max(0, static_cast<int>(std::floor(blob.cy - reach)));
  const int r1 = std::min(rows - 1, static_cast<int>(std::ceil(blob.cy + reach)));
  const int c0 = std::max(0, static_cast<int>(std::floor(blob.cx - reach)));
  const int c1 = std::min(cols - 1, static_cast<int>(std::ceil(blob.cx + reach)));
  const double ct = std::cos(blob.theta), st = std::sin(blob.theta);
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      const double dy = r - blob.cy, dx = c - blob.cx;
      const double u = dx * ct + dy * st;
      const double v = -dx * st + dy * ct;
      const double val = std::pow(std::abs(u / blob.a), blob.p) +
                         std::pow(std::abs(v / blob.b), blob.p);
      if (val < 1.0) blob.pixels.push_back({r, c});
    }
}

bool fully_inside(const Blob& blob, int rows, int cols) {
  const double reach = std::max(blob.a, blob.b);
  return blob.cy - reach >= 1.0 && blob.cy + reach <= rows - 2.0 &&
         blob.cx - reach >= 1.0 && blob.cx + reach <= cols - 2.0;
}

int adjacency(const std::vector<Pixel>& pixels, const LabelMap& labels) {
  int count = 0;
  constexpr int dr[4] = {-1, 1, 0, 0};
  constexpr int dc[4] = {0, 0, -1, 1};
  for (const auto& px : pixels)
    for (int k = 0; k < 4; ++k) {
      const int r = px.row + dr[k], c = px.col + dc[k];
      if (r < 0 || r >= labels.rows() || c < 0 || c >= labels.cols()) continue;
      if (labels(r, c) > 0) {
        ++count;
        break;
      }
    }
  return count;
}

bool overlaps(const std::vector<Pixel>& pixels, const LabelMap& labels) {
  for (const auto& px : pixels)
    if (labels(px.row, px.col) > 0) return true;
  return false;
}

}  // namespace

SynthSample generate(const GenConfig& cfg) {
  if (cfg.rows < 8 || cfg.cols < 8)
    throw std::invalid_argument("generate: image too small");
  if (cfg.min_instances < 1 || cfg.max_instances < cfg.min_instances)
    throw std::invalid_argument("generate: bad instance range");
  if (cfg.min_radius < 2.0 || cfg.max_radius < cfg.min_radius)
    throw std::invalid_argument("generate: bad radius range");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> count_dist(cfg.min_instances,
                                                cfg.max_instances);
  SynthSample sample;
  sample.requested = count_dist(rng);
  sample.labels = LabelMap::Zero(cfg.rows, cfg.cols);
  sample.smooth_field = Image::Zero(cfg.rows, cfg.cols);
  sample.image = Image::Zero(cfg.rows, cfg.cols);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> radius(cfg.min_radius, cfg.max_radius);
  std::uniform_real_distribution<double> exponent(1.8, 3.2);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<Blob> blobs;
  for (int inst = 0; inst < sample.requested; ++inst) {
    bool placed = false;
    for (int attempt = 0; attempt < 300 && !placed; ++attempt) {
      Blob blob;
      blob.a = radius(rng);
      blob.b = radius(rng);
      blob.p = exponent(rng);
      blob.theta = angle(rng);
      const bool try_touch = !blobs.empty() && unit(rng) < cfg.touch_probability;
      if (try_touch) {
        std::uniform_int_distribution<std::size_t> pick(0, blobs.size() - 1);
        const Blob& anchor = blobs[pick(rng)];
        const double dir = angle(rng);
        // Slightly inside the sum of typical extents so boundaries meet.
        const double dist =
            (0.5 * (anchor.a + anchor.b) + 0.5 * (blob.a + blob.b)) *
            (0.92 + 0.12 * unit(rng));
        blob.cy = anchor.cy + dist * std::sin(dir);
        blob.cx = anchor.cx + dist * std::cos(dir);
      } else {
        blob.cy = 1.0 + unit(rng) * (cfg.rows - 2);
        blob.cx = 1.0 + unit(rng) * (cfg.cols - 2);
      }
      if (!fully_inside(blob, cfg.rows, cfg.cols)) continue;
      rasterize(blob, cfg.rows, cfg.cols);
      if (blob.pixels.size() < 12) continue;
      if (overlaps(blob.pixels, sample.labels)) continue;
      if (try_touch && adjacency(blob.pixels, sample.labels) < 3) continue;
      const int lab = static_cast<int>(blobs.size()) + 1;
      for (const auto& px : blob.pixels) sample.labels(px.row, px.col) = lab;
      blobs.push_back(std::move(blob));
      placed = true;
    }
  }
  sample.placed = static_cast<int>(blobs.size());

  // Per-instance smooth field: a small mixture of plane-wave cosines with
  // instance-specific directions and phases.
  for (std::size_t u = 0; u < blobs.size(); ++u) {
    constexpr int kWaves = 3;
    double dirs[kWaves], phases[kWaves];
    for (int k = 0; k < kWaves; ++k) {
      dirs[k] = angle(rng);
      phases[k] = angle(rng);
    }
    for (const auto& px : blobs[u].pixels) {
      double s = 0.0;
      for (int k = 0; k < kWaves; ++k) {
        const double proj =
            px.row * std::sin(dirs[k]) + px.col * std::cos(dirs[k]);
        s += std::cos(2.0 * std::numbers::pi * proj / cfg.corr_length +
                      phases[k]);
      }
      sample.smooth_field(px.row, px.col) = cfg.smooth_amplitude * s / kWaves;
    }
  }

  std::normal_distribution<double> base(cfg.base_mean,
                                        std::sqrt(cfg.base_variance));
  std::normal_distribution<double> noise(0.0, std::sqrt(cfg.noise_variance));
  std::normal_distribution<double> background(
      cfg.bg_mean, std::sqrt(cfg.bg_variance + cfg.noise_variance));
  std::vector<double> base_values(blobs.size());
  for (auto& b : base_values) b = base(rng);
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c) {
      const int lab = sample.labels(r, c);
      if (lab == 0) {
        sample.image(r, c) = background(rng);
      } else {
        sample.image(r, c) =
            base_values[lab - 1] + sample.smooth_field(r, c) + noise(rng);
      }
    }
  return sample;
}

OracleBlobModel make_oracle(const GenConfig& cfg, const SynthSample& sample) {
  const int fov = static_cast<int>(std::ceil(2.0 * cfg.max_radius)) + 2;
  return OracleBlobModel(sample.labels, sample.smooth_field, cfg.base_mean,
                         cfg.base_variance, cfg.noise_variance, cfg.bg_mean,
                         cfg.bg_variance, fov);
}

}  // namespace igmseg
