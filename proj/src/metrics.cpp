#include "igmseg/metrics.hpp"

#include <map>
#include <stdexcept>

namespace igmseg {

MatchTable match_segments(const LabelMap& gt, const LabelMap& pred,
                          bool sparse_gt) {
  if (gt.rows() != pred.rows() || gt.cols() != pred.cols())
    throw std::invalid_argument("match_segments: shape mismatch");

  std::map<int, std::int64_t> gt_size, pred_size;
  std::map<std::pair<int, int>, std::int64_t> overlap;
  for (int r = 0; r < gt.rows(); ++r)
    for (int c = 0; c < gt.cols(); ++c) {
      const int g = gt(r, c), p = pred(r, c);
      if (g > 0) ++gt_size[g];
      if (p > 0 && !(sparse_gt && g == 0)) ++pred_size[p];
      if (g > 0 && p > 0) ++overlap[{g, p}];
    }
  if (gt_size.empty())
    throw std::invalid_argument("match_segments: no ground-truth segments");

  MatchTable table;
  for (const auto& [g, gsize] : gt_size) {
    MatchEntry e;
    e.gt_label = g;
    for (const auto& [key, ov] : overlap) {
      if (key.first != g) continue;
      if (2 * ov > gsize) {  // strict majority cover
        e.pred_label = key.second;
        e.overlap = ov;
        const std::int64_t uni = gsize + pred_size[key.second] - ov;
        e.iou = static_cast<double>(ov) / static_cast<double>(uni);
        break;
      }
    }
    table.entries.push_back(e);
  }
  return table;
}

double seg_score(const LabelMap& gt, const LabelMap& pred, bool sparse_gt) {
  const MatchTable table = match_segments(gt, pred, sparse_gt);
  long double acc = 0.0L;
  for (const auto& e : table.entries) acc += e.iou;
  return static_cast<double>(acc / table.entries.size());
}

std::vector<double> detection_accuracy(const LabelMap& gt, const LabelMap& pred,
                                       const std::vector<double>& thresholds,
                                       bool sparse_gt) {
  for (const double t : thresholds)
    if (!(t > 0.0 && t <= 1.0))
      throw std::invalid_argument("detection_accuracy: threshold outside (0,1]");
  const MatchTable table = match_segments(gt, pred, sparse_gt);
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (const double t : thresholds) {
    int hits = 0;
    for (const auto& e : table.entries)
      if (e.pred_label != 0 && e.iou >= t) ++hits;
    out.push_back(static_cast<double>(hits) / table.entries.size());
  }
  return out;
}

}  // namespace igmseg
