#include "igmseg/igm.hpp"

#include <cmath>
#include <stdexcept>

namespace igmseg {

double kl_gaussian(const PixelDistribution& p, const PixelDistribution& q) {
  if (!std::isfinite(p.mean) || !std::isfinite(p.variance) ||
      !std::isfinite(q.mean) || !std::isfinite(q.variance))
    throw std::invalid_argument("kl_gaussian: non-finite input");
  const double vp = std::max(p.variance, kVarianceFloor);
  const double vq = std::max(q.variance, kVarianceFloor);
  const double dm = p.mean - q.mean;
  return 0.5 * std::log(vq / vp) + (vp + dm * dm) / (2.0 * vq) - 0.5;
}

double ig_exact(const InpaintModel& model, const Image& image, Pixel i,
                const PixelMask& mask) {
  const PixelMask full = PixelMask::Constant(image.rows(), image.cols(), true);
  const auto p_full = predict(model, image, full, {i});
  const auto p_mask = predict(model, image, mask, {i});
  return kl_gaussian(p_full.front(), p_mask.front());
}

RigMap rig_surrogate(const InpaintModel& model, const Image& image,
                     const std::vector<Pixel>& targets, const PixelMask& mask,
                     const PixelMask& region) {
  // Out-of-region pixels join the observed set of both sides.
  const PixelMask side_m = mask || !region;
  const PixelMask side_c = (!mask && region) || !region;
  const auto pred_m = predict(model, image, side_m, targets);
  const auto pred_c = predict(model, image, side_c, targets);
  RigMap rig;
  rig.targets = targets;
  rig.values.resize(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double x = image(targets[k].row, targets[k].col);
    rig.values[k] = gaussian_nll(x, pred_c[k]) - gaussian_nll(x, pred_m[k]);
  }
  return rig;
}

RigMap rig_surrogate(const InpaintModel& model, const Image& image,
                     const std::vector<Pixel>& targets,
                     const PixelMask& mask) {
  const PixelMask all = PixelMask::Constant(image.rows(), image.cols(), true);
  return rig_surrogate(model, image, targets, mask, all);
}

double igm_from_rig(const RigMap& rig, const PixelMask& mask) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < rig.targets.size(); ++k) {
    const auto& t = rig.targets[k];
    acc += mask(t.row, t.col) ? -rig.values[k] : rig.values[k];
  }
  return static_cast<double>(acc);
}

double igm_banded(const InpaintModel& model, const Image& image,
                  const PixelMask& mask, double d) {
  const PixelMask band = mask_boundary_band(mask, d);
  const auto targets = mask_pixels(band);
  if (targets.empty()) return 0.0;
  const RigMap rig = rig_surrogate(model, image, targets, mask);
  return igm_from_rig(rig, mask);
}

}  // namespace igmseg
