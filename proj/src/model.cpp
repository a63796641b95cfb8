#include "igmseg/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace igmseg {

double gaussian_nll(double x, const PixelDistribution& d) {
  const double v = std::max(d.variance, kVarianceFloor);
  const double r = x - d.mean;
  return 0.5 * std::log(2.0 * std::numbers::pi * v) + r * r / (2.0 * v);
}

std::vector<PixelDistribution> predict(const InpaintModel& model,
                                       const Image& image,
                                       const PixelMask& observed,
                                       const std::vector<Pixel>& targets) {
  if (image.rows() != observed.rows() || image.cols() != observed.cols())
    throw std::invalid_argument("predict: image/mask shape mismatch");
  if (targets.empty()) return {};
  PixelMask effective = observed;
  for (const auto& t : targets) effective(t.row, t.col) = false;
  std::vector<PixelDistribution> out;
  out.reserve(targets.size());
  for (const auto& t : targets)
    out.push_back(model.predict_one(image, effective, t.row, t.col));
  return out;
}

double inpaint_nll(const InpaintModel& model, const Image& image,
                   const PixelMask& observed) {
  if (observed.all())
    throw std::invalid_argument("inpaint_nll: nothing left to predict");
  long double acc = 0.0L;
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) {
      if (observed(r, c)) continue;
      const auto d = model.predict_one(image, observed, r, c);
      acc += gaussian_nll(image(r, c), d);
    }
  return static_cast<double>(acc);
}

LocalStatsModel::LocalStatsModel(double bandwidth, double prior_mean,
                                 double prior_variance,
                                 double residual_variance)
    : bandwidth_(bandwidth),
      prior_mean_(prior_mean),
      prior_variance_(std::max(prior_variance, kVarianceFloor)),
      residual_variance_(residual_variance),
      fov_radius_(static_cast<int>(std::ceil(3.0 * bandwidth))) {
  if (bandwidth <= 0.0)
    throw std::invalid_argument("LocalStatsModel: bandwidth must be positive");
  if (residual_variance < 0.0)
    throw std::invalid_argument("LocalStatsModel: negative residual variance");
  fov_radius_ = std::max(fov_radius_, 1);
}

std::pair<double, double> LocalStatsModel::kernel_stats(
    const Image& image, const PixelMask& observed, int row, int col) const {
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const int R = fov_radius_;
  const double inv2h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  long double wsum = 0.0L, wx = 0.0L;
  for (int dy = -R; dy <= R; ++dy) {
    const int r = row + dy;
    if (r < 0 || r >= rows) continue;
    for (int dx = -R; dx <= R; ++dx) {
      const int c = col + dx;
      if (c < 0 || c >= cols) continue;
      if (dy == 0 && dx == 0) continue;
      const int d2 = dy * dy + dx * dx;
      if (d2 > R * R) continue;
      if (!observed(r, c)) continue;
      const double w = std::exp(-d2 * inv2h2);
      wsum += w;
      wx += w * image(r, c);
    }
  }
  if (wsum <= 0.0L) return {0.0, 0.0};
  return {static_cast<double>(wx / wsum), static_cast<double>(wsum)};
}

PixelDistribution LocalStatsModel::predict_one(const Image& image,
                                               const PixelMask& observed,
                                               int row, int col) const {
  const auto [mean, mass] = kernel_stats(image, observed, row, col);
  if (mass <= 0.0) return {prior_mean_, prior_variance_};
  return {mean, residual_variance_ / mass + kVarianceFloor};
}

void LocalStatsModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("model: cannot write " + path);
  out.precision(17);
  out << "model_type=local_stats\n"
      << "bandwidth=" << bandwidth_ << "\n"
      << "prior_mean=" << prior_mean_ << "\n"
      << "prior_variance=" << prior_variance_ << "\n"
      << "residual_variance=" << residual_variance_ << "\n"
      << "fov_radius=" << fov_radius_ << "\n";
}

LocalStatsModel LocalStatsModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("model: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("model: malformed line in " + path);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (kv["model_type"] != "local_stats")
    throw std::runtime_error("model: unsupported model_type in " + path);
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error("model: missing key " + key + " in " + path);
    return std::stod(it->second);
  };
  LocalStatsModel m(get("bandwidth"), get("prior_mean"), get("prior_variance"),
                    get("residual_variance"));
  return m;
}

namespace {

struct HoldoutObs {
  double sq_error;
  double kernel_mass;  // 0 means prior fallback
  double prior_nll;
};

// NLL of the collected holdout observations as a function of the residual
// variance, with the variance floor applied.
double holdout_nll(const std::vector<HoldoutObs>& obs, double rv) {
  long double acc = 0.0L;
  for (const auto& o : obs) {
    if (o.kernel_mass <= 0.0) {
      acc += o.prior_nll;
      continue;
    }
    const double v = rv / o.kernel_mass + kVarianceFloor;
    acc += 0.5 * std::log(2.0 * std::numbers::pi * v) + o.sq_error / (2.0 * v);
  }
  return static_cast<double>(acc);
}

double optimize_residual_variance(const std::vector<HoldoutObs>& obs,
                                  double upper) {
  // Golden-section search on log residual variance.
  const double lo0 = std::log(1e-12);
  const double hi0 = std::log(std::max(upper, 1e-10));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = lo0, hi = hi0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = holdout_nll(obs, std::exp(a));
  double fb = holdout_nll(obs, std::exp(b));
  for (int it = 0; it < 80; ++it) {
    if (fa < fb) {
      hi = b; b = a; fb = fa;
      a = hi - phi * (hi - lo);
      fa = holdout_nll(obs, std::exp(a));
    } else {
      lo = a; a = b; fa = fb;
      b = lo + phi * (hi - lo);
      fb = holdout_nll(obs, std::exp(b));
    }
  }
  double rv = std::exp((lo + hi) / 2.0);
  // At the lower boundary the optimum is effectively zero residual variance;
  // snap exactly so equal-NLL bandwidths tie exactly.
  if (rv < 4e-12) rv = 0.0;
  return rv;
}

}  // namespace

FitResult fit_local_stats(const std::vector<Image>& images,
                          const std::vector<double>& bandwidth_grid,
                          const HoldoutSampler& sampler, std::uint64_t seed) {
  if (images.empty()) throw std::invalid_argument("fit: no images");
  if (bandwidth_grid.empty()) throw std::invalid_argument("fit: empty grid");

  long double sum = 0.0L, sq = 0.0L;
  std::int64_t n = 0;
  for (const auto& img : images) {
    validate_image(img);
    sum += img.sum();
    sq += img.square().sum();
    n += img.size();
  }
  const double prior_mean = static_cast<double>(sum / n);
  double prior_var =
      static_cast<double>(sq / n) - prior_mean * prior_mean;
  bool degenerate = false;
  if (prior_var < kVarianceFloor) {
    prior_var = kVarianceFloor;
    degenerate = true;
  }

  // One fixed set of rectangular holdout masks per image, shared across the
  // bandwidth grid.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::array<int, 4>>> rects(images.size());
  for (std::size_t k = 0; k < images.size(); ++k) {
    const int rows = static_cast<int>(images[k].rows());
    const int cols = static_cast<int>(images[k].cols());
    std::uniform_real_distribution<double> frac(sampler.min_fraction,
                                                sampler.max_fraction);
    for (int s = 0; s < sampler.count; ++s) {
      const double area = frac(rng) * rows * cols;
      std::uniform_real_distribution<double> aspect(0.5, 2.0);
      double h = std::sqrt(area * aspect(rng));
      int rh = std::clamp(static_cast<int>(std::lround(h)), 1, rows);
      int rw = std::clamp(static_cast<int>(std::lround(area / rh)), 1, cols);
      std::uniform_int_distribution<int> r0d(0, rows - rh), c0d(0, cols - rw);
      rects[k].push_back({r0d(rng), c0d(rng), rh, rw});
    }
  }

  FitResult best{LocalStatsModel(bandwidth_grid.front(), prior_mean, prior_var, 0.0), {}, degenerate};
  double best_nll = std::numeric_limits<double>::infinity();
  double best_bw = std::numeric_limits<double>::infinity();
  const PixelDistribution prior{prior_mean, prior_var};

  for (const double bw : bandwidth_grid) {
    LocalStatsModel probe(bw, prior_mean, prior_var, 1.0);
    std::vector<HoldoutObs> obs;
    for (std::size_t k = 0; k < images.size(); ++k) {
      const auto& img = images[k];
      for (const auto& rect : rects[k]) {
        PixelMask observed = PixelMask::Constant(img.rows(), img.cols(), true);
        for (int r = rect[0]; r < rect[0] + rect[2]; ++r)
          for (int c = rect[1]; c < rect[1] + rect[3]; ++c)
            observed(r, c) = false;
        for (int r = rect[0]; r < rect[0] + rect[2]; ++r)
          for (int c = rect[1]; c < rect[1] + rect[3]; ++c) {
            // Kernel mean and mass do not depend on the residual variance,
            // so they are collected once and reused during optimization.
            const auto [mean, mass] = probe.kernel_stats(img, observed, r, c);
            HoldoutObs o{};
            o.kernel_mass = mass;
            const double residual = img(r, c) - mean;
            o.sq_error = residual * residual;
            o.prior_nll = gaussian_nll(img(r, c), prior);
            obs.push_back(o);
          }
      }
    }
    const double rv = optimize_residual_variance(obs, 10.0 * prior_var + 1e-6);
    const double nll =
        holdout_nll(obs, rv) / static_cast<double>(std::max<std::size_t>(obs.size(), 1));
    best.mean_nll.push_back(nll);
    if (nll < best_nll || (nll == best_nll && bw < best_bw)) {
      best_nll = nll;
      best_bw = bw;
      best.model = LocalStatsModel(bw, prior_mean, prior_var, rv);
    }
  }
  return best;
}

OracleBlobModel::OracleBlobModel(LabelMap labels, Image smooth_field,
                                 double base_mean, double base_variance,
                                 double noise_variance, double bg_mean,
                                 double bg_variance, int fov_radius)
    : labels_(std::move(labels)),
      smooth_field_(std::move(smooth_field)),
      base_mean_(base_mean),
      base_variance_(base_variance),
      noise_variance_(std::max(noise_variance, kVarianceFloor)),
      bg_mean_(bg_mean),
      bg_variance_(bg_variance),
      fov_radius_(fov_radius) {
  if (labels_.rows() != smooth_field_.rows() ||
      labels_.cols() != smooth_field_.cols())
    throw std::invalid_argument("oracle: labels/field shape mismatch");
  if (fov_radius_ < 1) throw std::invalid_argument("oracle: fov_radius < 1");
}

PixelDistribution OracleBlobModel::predict_one(const Image& image,
                                               const PixelMask& observed,
                                               int row, int col) const {
  if (image.rows() != labels_.rows() || image.cols() != labels_.cols())
    throw std::invalid_argument("oracle: image shape mismatch");
  const int lab = labels_(row, col);
  if (lab == 0) {
    // Background pixels are independent of everything else.
    return {bg_mean_, bg_variance_ + noise_variance_};
  }
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const int R = fov_radius_;
  // Same-instance observed pixels inform the shared base intensity.
  long double ysum = 0.0L;
  int count = 0;
  for (int dy = -R; dy <= R; ++dy) {
    const int r = row + dy;
    if (r < 0 || r >= rows) continue;
    for (int dx = -R; dx <= R; ++dx) {
      const int c = col + dx;
      if (c < 0 || c >= cols) continue;
      if (dy == 0 && dx == 0) continue;
      if (dy * dy + dx * dx > R * R) continue;
      if (!observed(r, c) || labels_(r, c) != lab) continue;
      ysum += image(r, c) - smooth_field_(r, c);
      ++count;
    }
  }
  // Conjugate normal posterior over the instance base intensity.
  const double precision = 1.0 / base_variance_ + count / noise_variance_;
  const double post_mean =
      (base_mean_ / base_variance_ + static_cast<double>(ysum) / noise_variance_) /
      precision;
  const double post_var = 1.0 / precision;
  return {smooth_field_(row, col) + post_mean, post_var + noise_variance_};
}

std::unique_ptr<InpaintModel> OracleBlobModel::crop_window(int row0, int col0,
                                                           int rows,
                                                           int cols) const {
  if (row0 < 0 || col0 < 0 || row0 + rows > labels_.rows() ||
      col0 + cols > labels_.cols())
    throw std::invalid_argument("oracle: crop window out of bounds");
  return std::make_unique<OracleBlobModel>(
      LabelMap(labels_.block(row0, col0, rows, cols)),
      Image(smooth_field_.block(row0, col0, rows, cols)), base_mean_,
      base_variance_, noise_variance_, bg_mean_, bg_variance_, fov_radius_);
}

}  // namespace igmseg
