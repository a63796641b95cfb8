#ifndef IGMSEG_SPLITTER_HPP
#define IGMSEG_SPLITTER_HPP

#include <cstdint>
#include <vector>

#include "igmseg/grid.hpp"
#include "igmseg/igm.hpp"
#include "igmseg/model.hpp"

namespace igmseg {

struct SplitConfig {
  int iterations = 20;
  double d0 = 4.0;                  // initial band radius
  std::vector<double> smoothing_sigmas{0.1, 1.0, 5.0, 10.0};
  int min_region = 16;
  int max_depth = 8;
  bool d_schedule = true;           // false: hold the band radius at d0
  std::uint64_t seed = 0;
};

// Half-plane split of a grid; the mask is the top ceil(rows/2) rows or the
// left ceil(cols/2) columns.
PixelMask half_split(int rows, int cols, bool horizontal);

// Orientation picked by one coin flip from the seeded generator.
PixelMask initial_split(int rows, int cols, std::uint64_t seed);

struct EvolveResult {
  PixelMask mask;
  std::vector<double> trace;  // igm_banded per iteration, plus final value
  bool degenerate = false;    // mask drained empty or full: no split found
};

// Greedy boundary evolution: per iteration the band around the current
// boundary is reassigned by the sign of the (optionally smoothed) relative
// information gain. Band pixels with rig <= 0 go to the complement.
EvolveResult evolve_mask(const InpaintModel& model, const Image& image,
                         const PixelMask& m0, const SplitConfig& cfg);

// Region-restricted variant; out-of-region pixels are permanent context.
EvolveResult evolve_mask(const InpaintModel& model, const Image& image,
                         const PixelMask& m0, const SplitConfig& cfg,
                         const PixelMask& region);

// Band radius schedule: d0 for the first half, then linear decrease to 1,
// with d = 1 interleaved every second iteration.
double band_radius(const SplitConfig& cfg, int t);

struct SegmentTree {
  struct Node {
    PixelMask mask;
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes;  // node 0 is the root

  std::vector<int> leaves() const;
  // Flat labeling of the leaves, numbered in first-occurrence scan order.
  LabelMap leaf_labels() const;
};

// Recursive bipartitioning until regions drain, fall below min_region, or
// reach max_depth.
SegmentTree hierarchical_split(const InpaintModel& model, const Image& image,
                               const SplitConfig& cfg);

}  // namespace igmseg

#endif
