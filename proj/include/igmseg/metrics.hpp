#ifndef IGMSEG_METRICS_HPP
#define IGMSEG_METRICS_HPP

#include <vector>

#include "igmseg/grid.hpp"

namespace igmseg {

// Per ground-truth segment: the predicted segment covering more than half of
// it (if any) and the resulting IoU. At most one such prediction can exist.
struct MatchEntry {
  int gt_label = 0;
  int pred_label = 0;  // 0 = unmatched
  std::int64_t overlap = 0;
  double iou = 0.0;
};

struct MatchTable {
  std::vector<MatchEntry> entries;
};

// sparse_gt: pixels with ground-truth label 0 are excluded from IoU
// denominators (partially labeled frames).
MatchTable match_segments(const LabelMap& gt, const LabelMap& pred,
                          bool sparse_gt = false);

// Mean IoU over ground-truth segments; unmatched segments contribute 0.
double seg_score(const LabelMap& gt, const LabelMap& pred,
                 bool sparse_gt = false);

// Fraction of ground-truth segments whose matched IoU reaches each threshold.
std::vector<double> detection_accuracy(const LabelMap& gt, const LabelMap& pred,
                                       const std::vector<double>& thresholds,
                                       bool sparse_gt = false);

}  // namespace igmseg

#endif
