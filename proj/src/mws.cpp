#include "igmseg/mws.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace igmseg {

EdgeList build_edges(const AffinityField& field, const MwsConfig& cfg) {
  if (field.offsets != AffinityNeighborhood::all())
    throw std::invalid_argument("build_edges: unexpected offset neighborhood");
  if (cfg.alpha < 0.0) throw std::invalid_argument("build_edges: alpha < 0");
  if (cfg.foreground &&
      (cfg.foreground->rows() != field.rows || cfg.foreground->cols() != field.cols))
    throw std::invalid_argument("build_edges: foreground shape mismatch");

  const std::size_t n_attractive = AffinityNeighborhood::attractive().size();
  EdgeList list;
  list.rows = field.rows;
  list.cols = field.cols;
  list.foreground = cfg.foreground;
  for (std::size_t o = 0; o < field.offsets.size(); ++o) {
    const bool attractive = o < n_attractive;
    const auto& off = field.offsets[o];
    for (int r = 0; r < field.rows; ++r) {
      const int rr = r + off.dy;
      if (rr < 0 || rr >= field.rows) continue;
      for (int c = 0; c < field.cols; ++c) {
        const int cc = c + off.dx;
        if (cc < 0 || cc >= field.cols) continue;
        if (field.counts[o](r, c) == 0) continue;
        if (cfg.foreground && (!(*cfg.foreground)(r, c) || !(*cfg.foreground)(rr, cc)))
          continue;
        const double aff = field.weight(o, r, c);
        Edge e;
        e.u = pixel_index(r, c, field.cols);
        e.v = pixel_index(rr, cc, field.cols);
        if (e.u > e.v) std::swap(e.u, e.v);
        e.attractive = attractive;
        e.weight = attractive ? aff : cfg.alpha * (1.0 - aff);
        list.edges.push_back(e);
      }
    }
  }
  return list;
}

namespace {

struct MutexUnionFind {
  std::vector<std::int64_t> parent;
  std::vector<std::int64_t> size;
  // Constraints are stored between set handles, not roots, so a surviving
  // set never needs its counterpart back-pointers rewritten when the larger
  // of two sets changes owner during a union.
  std::vector<std::int64_t> handle;  // root -> constraint-set handle
  std::vector<std::unordered_set<std::int64_t>> sets;  // handle -> handles

  explicit MutexUnionFind(std::int64_t n)
      : parent(n), size(n, 1), handle(n), sets(n) {
    std::iota(parent.begin(), parent.end(), 0);
    std::iota(handle.begin(), handle.end(), 0);
  }

  std::int64_t find(std::int64_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool constrained(std::int64_t ra, std::int64_t rb) const {
    const std::int64_t ha = handle[ra], hb = handle[rb];
    return sets[ha].size() <= sets[hb].size() ? sets[ha].count(hb) > 0
                                              : sets[hb].count(ha) > 0;
  }

  void add_mutex(std::int64_t ra, std::int64_t rb) {
    sets[handle[ra]].insert(handle[rb]);
    sets[handle[rb]].insert(handle[ra]);
  }

  // Union by component size; the smaller constraint set is folded into the
  // larger one, which the merged root then adopts.
  std::int64_t unite(std::int64_t ra, std::int64_t rb) {
    if (size[ra] < size[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    size[ra] += size[rb];
    std::int64_t big = handle[ra], small = handle[rb];
    if (sets[small].size() > sets[big].size()) std::swap(big, small);
    for (const std::int64_t c : sets[small]) {
      sets[c].erase(small);
      if (c != big) {
        sets[c].insert(big);
        sets[big].insert(c);
      }
    }
    sets[small].clear();
    handle[ra] = big;
    return ra;
  }
};

}  // namespace

LabelMap mutex_watershed(const EdgeList& list) {
  for (const auto& e : list.edges)
    if (!std::isfinite(e.weight))
      throw std::invalid_argument("mutex_watershed: non-finite weight");

  std::vector<Edge> edges = list.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.attractive != b.attractive) return a.attractive;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  const std::int64_t n = static_cast<std::int64_t>(list.rows) * list.cols;
  MutexUnionFind uf(n);
  for (const auto& e : edges) {
    const std::int64_t ru = uf.find(e.u), rv = uf.find(e.v);
    if (ru == rv) continue;
    if (e.attractive) {
      if (!uf.constrained(ru, rv)) uf.unite(ru, rv);
    } else {
      uf.add_mutex(ru, rv);
    }
  }

  LabelMap labels = LabelMap::Zero(list.rows, list.cols);
  std::vector<int> relabel(n, 0);
  int next = 1;
  for (int r = 0; r < list.rows; ++r)
    for (int c = 0; c < list.cols; ++c) {
      if (list.foreground && !(*list.foreground)(r, c)) continue;
      const std::int64_t root = uf.find(pixel_index(r, c, list.cols));
      if (relabel[root] == 0) relabel[root] = next++;
      labels(r, c) = relabel[root];
    }
  return labels;
}

LabelMap apply_foreground(const LabelMap& labels, const PixelMask& fg) {
  if (labels.rows() != fg.rows() || labels.cols() != fg.cols())
    throw std::invalid_argument("apply_foreground: shape mismatch");
  LabelMap out = LabelMap::Zero(labels.rows(), labels.cols());
  std::vector<std::pair<int, int>> relabel;  // old -> new
  auto densify = [&](int old) {
    for (auto& [o, n] : relabel)
      if (o == old) return n;
    relabel.emplace_back(old, static_cast<int>(relabel.size()) + 1);
    return relabel.back().second;
  };
  for (int r = 0; r < labels.rows(); ++r)
    for (int c = 0; c < labels.cols(); ++c)
      if (fg(r, c) && labels(r, c) > 0) out(r, c) = densify(labels(r, c));
  return out;
}

LabelMap merge_small_segments(const LabelMap& labels,
                              const AffinityField& field, int min_segment) {
  if (min_segment <= 0) return labels;
  LabelMap out = labels;
  const std::size_t n_attractive = AffinityNeighborhood::attractive().size();
  bool changed = true;
  while (changed) {
    changed = false;
    const int max_label = out.maxCoeff();
    std::vector<std::int64_t> sizes(max_label + 1, 0);
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c) ++sizes[out(r, c)];
    for (int lab = 1; lab <= max_label; ++lab) {
      if (sizes[lab] == 0 || sizes[lab] >= min_segment) continue;
      // Mean attractive affinity toward each neighboring segment.
      std::vector<double> sum(max_label + 1, 0.0);
      std::vector<int> cnt(max_label + 1, 0);
      for (std::size_t o = 0; o < n_attractive; ++o) {
        const auto& off = field.offsets[o];
        for (int r = 0; r < out.rows(); ++r)
          for (int c = 0; c < out.cols(); ++c) {
            const int rr = r + off.dy, cc = c + off.dx;
            if (rr < 0 || rr >= out.rows() || cc < 0 || cc >= out.cols())
              continue;
            const int a = out(r, c), b = out(rr, cc);
            if (a == b || (a != lab && b != lab)) continue;
            const int other = a == lab ? b : a;
            if (other == 0) continue;
            if (field.counts[o](r, c) == 0) continue;
            sum[other] += field.weight(o, r, c);
            ++cnt[other];
          }
      }
      int best = 0;
      double best_mean = -1.0;
      for (int other = 1; other <= max_label; ++other)
        if (cnt[other] > 0 && sum[other] / cnt[other] > best_mean) {
          best_mean = sum[other] / cnt[other];
          best = other;
        }
      if (best > 0) {
        for (int r = 0; r < out.rows(); ++r)
          for (int c = 0; c < out.cols(); ++c)
            if (out(r, c) == lab) out(r, c) = best;
        changed = true;
      }
    }
  }
  // Densify.
  const PixelMask fg = out > 0;
  return apply_foreground(out, fg);
}

LabelMap connected_components(const PixelMask& mask) {
  const int rows = static_cast<int>(mask.rows());
  const int cols = static_cast<int>(mask.cols());
  LabelMap labels = LabelMap::Zero(rows, cols);
  int next = 1;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (!mask(r, c) || labels(r, c) != 0) continue;
      const int lab = next++;
      stack.push_back({r, c});
      labels(r, c) = lab;
      while (!stack.empty()) {
        const auto [cr, cc] = stack.back();
        stack.pop_back();
        constexpr int dr[4] = {-1, 1, 0, 0};
        constexpr int dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int nr = cr + dr[k], nc = cc + dc[k];
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          if (!mask(nr, nc) || labels(nr, nc) != 0) continue;
          labels(nr, nc) = lab;
          stack.push_back({nr, nc});
        }
      }
    }
  return labels;
}

}  // namespace igmseg
