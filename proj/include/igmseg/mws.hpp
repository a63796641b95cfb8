#ifndef IGMSEG_MWS_HPP
#define IGMSEG_MWS_HPP

#include <optional>
#include <vector>

#include "igmseg/affinity.hpp"
#include "igmseg/grid.hpp"

namespace igmseg {

struct MwsConfig {
  double alpha = 1.0;
  std::optional<PixelMask> foreground;
  int min_segment = 0;  // post-filter; 0 disables
};

struct Edge {
  std::int64_t u = 0;  // normalized u < v
  std::int64_t v = 0;
  double weight = 0.0;
  bool attractive = true;
};

struct EdgeList {
  int rows = 0;
  int cols = 0;
  std::vector<Edge> edges;
  std::optional<PixelMask> foreground;
};

// One edge per defined affinity entry; attractive weight = affinity, mutex
// weight = alpha * (1 - affinity). Edges with an endpoint outside the
// foreground are dropped.
EdgeList build_edges(const AffinityField& field, const MwsConfig& cfg);

// Mutex watershed: edges in decreasing weight order (ties attractive-first,
// then lexicographic endpoints); attractive edges merge unless blocked by a
// mutex constraint, mutex edges install constraints unless already merged.
LabelMap mutex_watershed(const EdgeList& edges);

// Zeroes labels outside the mask and re-densifies the rest to 1..K.
LabelMap apply_foreground(const LabelMap& labels, const PixelMask& fg);

// 4-connected components of a mask; baseline segmentation.
LabelMap connected_components(const PixelMask& mask);

// Merges segments smaller than min_segment into the neighboring segment with
// the highest mean attractive affinity across the shared boundary.
LabelMap merge_small_segments(const LabelMap& labels,
                              const AffinityField& field, int min_segment);

}  // namespace igmseg

#endif
