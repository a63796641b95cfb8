#ifndef IGMSEG_IGM_HPP
#define IGMSEG_IGM_HPP

#include <vector>

#include "igmseg/grid.hpp"
#include "igmseg/model.hpp"

namespace igmseg {

// Closed-form KL divergence of univariate Gaussians, KL(p || q).
double kl_gaussian(const PixelDistribution& p, const PixelDistribution& q);

// Information gain of pixel i: how much better the full conditional predicts
// x_i than the M-restricted conditional.
double ig_exact(const InpaintModel& model, const Image& image, Pixel i,
                const PixelMask& mask);

// Relative information gain per target pixel; positive means the mask side
// reconstructs the pixel's true value better than the complement side.
struct RigMap {
  std::vector<Pixel> targets;
  std::vector<double> values;
};

// NLL-difference surrogate: rig(i) = nll(x_i | complement \ N) -
// nll(x_i | mask \ N). Both conditionals exclude the whole target set, so one
// joint model evaluation per side suffices.
RigMap rig_surrogate(const InpaintModel& model, const Image& image,
                     const std::vector<Pixel>& targets, const PixelMask& mask);

// Region-restricted variant: pixels outside `region` count as observed
// context on both sides.
RigMap rig_surrogate(const InpaintModel& model, const Image& image,
                     const std::vector<Pixel>& targets, const PixelMask& mask,
                     const PixelMask& region);

// Banded information-gain measure on N = mask_boundary_band(mask, d). The
// greedy boundary update monotonically decreases this quantity; the true
// segmentation minimizes it. Invariant under swapping mask and complement.
double igm_banded(const InpaintModel& model, const Image& image,
                  const PixelMask& mask, double d);

// Sum for a precomputed band/rig pair, fixed index order, extended precision.
double igm_from_rig(const RigMap& rig, const PixelMask& mask);

}  // namespace igmseg

#endif
