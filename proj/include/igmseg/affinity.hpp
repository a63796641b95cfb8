#ifndef IGMSEG_AFFINITY_HPP
#define IGMSEG_AFFINITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "igmseg/grid.hpp"
#include "igmseg/model.hpp"
#include "igmseg/splitter.hpp"

namespace igmseg {

// Fixed 12-offset neighborhood: short-range attractive edges plus sparse
// long-range repulsive edges.
struct AffinityNeighborhood {
  static const std::vector<Offset>& attractive();
  static const std::vector<Offset>& repulsive();
  static const std::vector<Offset>& all();  // attractive first
};

// Per-offset edge weights in [0,1] with contribution counts. An edge
// (i, i + offset) is stored at pixel i; count 0 means undefined.
struct AffinityField {
  int rows = 0;
  int cols = 0;
  std::vector<Offset> offsets;
  std::vector<Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>>
      numerators;
  std::vector<Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>>
      counts;

  double weight(std::size_t offset_idx, int row, int col) const;  // NaN if undefined
};

struct SweepConfig {
  int patch_size = 48;
  int stride = 24;
  SplitConfig split;
  std::uint64_t seed = 0;
  int workers = 1;
};

// Binary affinities of one patch: 1 where both edge endpoints share a leaf,
// 0 otherwise, -1 where the edge leaves the patch.
std::vector<Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>>
patch_affinities(const SegmentTree& tree);

// Tiles the image with sliding patches (trailing row/column clamped to the
// edge), splits each hierarchically, and averages the per-patch affinities.
// Patch seeds derive from (seed, patch row, patch col), so the result is
// independent of patch processing order.
AffinityField sweep(const Image& image, const InpaintModel& model,
                    const SweepConfig& cfg);

// "IAF1" binary file format, bit-exact.
void write_affinity_file(const std::string& path, const AffinityField& field);
AffinityField read_affinity_file(const std::string& path);

}  // namespace igmseg

#endif
