#include "igmseg/splitter.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace igmseg {

PixelMask half_split(int rows, int cols, bool horizontal) {
  if (rows < 2 || cols < 2)
    throw std::invalid_argument("half_split: shape must be at least 2x2");
  PixelMask m = PixelMask::Constant(rows, cols, false);
  if (horizontal) {
    const int top = (rows + 1) / 2;
    m.topRows(top).setConstant(true);
  } else {
    const int left = (cols + 1) / 2;
    m.leftCols(left).setConstant(true);
  }
  return m;
}

PixelMask initial_split(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const bool horizontal = (rng() & 1) != 0;
  return half_split(rows, cols, horizontal);
}

double band_radius(const SplitConfig& cfg, int t) {
  if (!cfg.d_schedule) return cfg.d0;
  if (t % 2 == 1) return 1.0;
  const int half = cfg.iterations / 2;
  if (t < half) return cfg.d0;
  const int tail = cfg.iterations - half;
  const double frac =
      tail > 1 ? static_cast<double>(t - half) / (tail - 1) : 1.0;
  return cfg.d0 + frac * (1.0 - cfg.d0);
}

namespace {

// Dense Gaussian blur, kernel truncated at 4 sigma, zero padding.
Eigen::ArrayXXd gauss_blur(const Eigen::ArrayXXd& in, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  Eigen::ArrayXd k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    k(i + radius) = std::exp(-0.5 * i * i / (sigma * sigma));
  k /= k.sum();
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  Eigen::ArrayXXd tmp = Eigen::ArrayXXd::Zero(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      long double acc = 0.0L;
      const int lo = std::max(-radius, -r), hi = std::min(radius, rows - 1 - r);
      for (int i = lo; i <= hi; ++i) acc += k(i + radius) * in(r + i, c);
      tmp(r, c) = static_cast<double>(acc);
    }
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      long double acc = 0.0L;
      const int lo = std::max(-radius, -c), hi = std::min(radius, cols - 1 - c);
      for (int i = lo; i <= hi; ++i) acc += k(i + radius) * tmp(r, c + i);
      out(r, c) = static_cast<double>(acc);
    }
  return out;
}

// Multi-scale smoothing of a reconstruction-error map: the blurred maps are
// added on top of the pixel-wise error.
Eigen::ArrayXXd smooth_error(const Eigen::ArrayXXd& err,
                             const std::vector<double>& sigmas) {
  Eigen::ArrayXXd out = err;
  for (const double s : sigmas) out += gauss_blur(err, s);
  return out;
}

}  // namespace

EvolveResult evolve_mask(const InpaintModel& model, const Image& image,
                         const PixelMask& m0, const SplitConfig& cfg,
                         const PixelMask& region) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("evolve_mask: iterations < 1");
  if (cfg.d0 < 1.0) throw std::invalid_argument("evolve_mask: d0 < 1");
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  PixelMask mask = m0 && region;
  const Eigen::Index region_count = region.count();
  if (mask.count() == 0 || mask.count() == region_count)
    throw std::invalid_argument("evolve_mask: m0 must be a proper subset");

  EvolveResult res;
  double last_d = cfg.d0;
  for (int t = 0; t < cfg.iterations; ++t) {
    const double d = band_radius(cfg, t);
    last_d = d;
    const PixelMask band = mask_boundary_band(mask, d, region);
    const auto targets = mask_pixels(band);
    if (targets.empty()) {
      res.degenerate = true;
      break;
    }

    const PixelMask side_m = mask || !region;
    const PixelMask side_c = !mask || !region;
    const auto pred_m = predict(model, image, side_m, targets);
    const auto pred_c = predict(model, image, side_c, targets);
    std::vector<double> err_m(targets.size()), err_c(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const double x = image(targets[k].row, targets[k].col);
      err_m[k] = gaussian_nll(x, pred_m[k]);
      err_c[k] = gaussian_nll(x, pred_c[k]);
    }

    {
      RigMap rig;
      rig.targets = targets;
      rig.values.resize(targets.size());
      for (std::size_t k = 0; k < targets.size(); ++k)
        rig.values[k] = err_c[k] - err_m[k];
      res.trace.push_back(igm_from_rig(rig, mask));
    }

    std::vector<double> rig_values(targets.size());
    if (cfg.smoothing_sigmas.empty()) {
      for (std::size_t k = 0; k < targets.size(); ++k)
        rig_values[k] = err_c[k] - err_m[k];
    } else {
      Eigen::ArrayXXd em = Eigen::ArrayXXd::Zero(rows, cols);
      Eigen::ArrayXXd ec = Eigen::ArrayXXd::Zero(rows, cols);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        em(targets[k].row, targets[k].col) = err_m[k];
        ec(targets[k].row, targets[k].col) = err_c[k];
      }
      const Eigen::ArrayXXd ems = smooth_error(em, cfg.smoothing_sigmas);
      const Eigen::ArrayXXd ecs = smooth_error(ec, cfg.smoothing_sigmas);
      for (std::size_t k = 0; k < targets.size(); ++k)
        rig_values[k] = ecs(targets[k].row, targets[k].col) -
                        ems(targets[k].row, targets[k].col);
    }

    // Strict sign test; ties go to the complement.
    for (std::size_t k = 0; k < targets.size(); ++k)
      mask(targets[k].row, targets[k].col) = rig_values[k] > 0.0;

    const Eigen::Index count = mask.count();
    if (count == 0 || count == region_count) {
      res.degenerate = true;
      break;
    }
  }

  if (!res.degenerate) {
    const PixelMask band = mask_boundary_band(mask, last_d, region);
    const auto targets = mask_pixels(band);
    if (!targets.empty()) {
      const RigMap rig = rig_surrogate(model, image, targets, mask, region);
      res.trace.push_back(igm_from_rig(rig, mask));
    }
  }
  res.mask = mask;
  return res;
}

EvolveResult evolve_mask(const InpaintModel& model, const Image& image,
                         const PixelMask& m0, const SplitConfig& cfg) {
  const PixelMask all = PixelMask::Constant(image.rows(), image.cols(), true);
  return evolve_mask(model, image, m0, cfg, all);
}

std::vector<int> SegmentTree::leaves() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
    if (nodes[i].left < 0 && nodes[i].right < 0) out.push_back(i);
  return out;
}

LabelMap SegmentTree::leaf_labels() const {
  if (nodes.empty()) throw std::logic_error("SegmentTree: empty");
  const auto& root = nodes.front().mask;
  LabelMap owner = LabelMap::Constant(root.rows(), root.cols(), -1);
  for (const int leaf : leaves()) {
    const auto& m = nodes[leaf].mask;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c)
        if (m(r, c)) owner(r, c) = leaf;
  }
  // Densify to 1..K in first-occurrence scan order.
  LabelMap labels = LabelMap::Zero(root.rows(), root.cols());
  std::vector<int> relabel(nodes.size(), 0);
  int next = 1;
  for (int r = 0; r < owner.rows(); ++r)
    for (int c = 0; c < owner.cols(); ++c) {
      const int o = owner(r, c);
      if (o < 0) continue;
      if (relabel[o] == 0) relabel[o] = next++;
      labels(r, c) = relabel[o];
    }
  return labels;
}

namespace {

struct TreeBuilder {
  const InpaintModel& model;
  const Image& image;
  const SplitConfig& cfg;
  SegmentTree tree;

  int build(const PixelMask& region, int depth, std::uint64_t seed) {
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({region, -1, -1});
    if (depth >= cfg.max_depth) return idx;
    if (region.count() < std::max(cfg.min_region, 4)) return idx;

    // Half-plane split of the region's bounding box.
    int r0 = static_cast<int>(region.rows()), r1 = -1;
    int c0 = static_cast<int>(region.cols()), c1 = -1;
    for (int r = 0; r < region.rows(); ++r)
      for (int c = 0; c < region.cols(); ++c)
        if (region(r, c)) {
          r0 = std::min(r0, r); r1 = std::max(r1, r);
          c0 = std::min(c0, c); c1 = std::max(c1, c);
        }
    const int bh = r1 - r0 + 1, bw = c1 - c0 + 1;
    if (bh < 2 && bw < 2) return idx;

    std::mt19937_64 rng(mix_seed(seed, 0));
    bool horizontal = (rng() & 1) != 0;
    if (bh < 2) horizontal = false;
    if (bw < 2) horizontal = true;

    PixelMask m0;
    for (int attempt = 0; attempt < 2; ++attempt) {
      PixelMask half = PixelMask::Constant(region.rows(), region.cols(), false);
      if (horizontal) {
        const int split = r0 + (bh + 1) / 2;
        for (int r = r0; r < split; ++r)
          for (int c = c0; c <= c1; ++c) half(r, c) = true;
      } else {
        const int split = c0 + (bw + 1) / 2;
        for (int c = c0; c < split; ++c)
          for (int r = r0; r <= r1; ++r) half(r, c) = true;
      }
      m0 = region && half;
      if (m0.count() > 0 && m0.count() < region.count()) break;
      horizontal = !horizontal;
      m0.resize(0, 0);
    }
    if (m0.size() == 0) return idx;

    const auto res = evolve_mask(model, image, m0, cfg, region);
    if (res.degenerate) return idx;

    const int left = build(res.mask, depth + 1, mix_seed(seed, 1));
    const int right =
        build(region && !res.mask, depth + 1, mix_seed(seed, 2));
    tree.nodes[idx].left = left;
    tree.nodes[idx].right = right;
    return idx;
  }
};

}  // namespace

SegmentTree hierarchical_split(const InpaintModel& model, const Image& image,
                               const SplitConfig& cfg) {
  validate_image(image);
  TreeBuilder builder{model, image, cfg, {}};
  const PixelMask all = PixelMask::Constant(image.rows(), image.cols(), true);
  builder.build(all, 0, cfg.seed);
  return builder.tree;
}

}  // namespace igmseg
