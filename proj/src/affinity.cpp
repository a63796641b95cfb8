#include "igmseg/affinity.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace igmseg {

const std::vector<Offset>& AffinityNeighborhood::attractive() {
  static const std::vector<Offset> v{{-1, 0}, {0, -1}};
  return v;
}

const std::vector<Offset>& AffinityNeighborhood::repulsive() {
  static const std::vector<Offset> v{{-9, 0},  {0, -9},  {-9, -9}, {9, -9},
                                     {-9, -4}, {-4, -9}, {4, -9},  {9, -4},
                                     {-27, 0}, {0, -27}};
  return v;
}

const std::vector<Offset>& AffinityNeighborhood::all() {
  static const std::vector<Offset> v = [] {
    std::vector<Offset> out = attractive();
    const auto& rep = repulsive();
    out.insert(out.end(), rep.begin(), rep.end());
    return out;
  }();
  return v;
}

double AffinityField::weight(std::size_t offset_idx, int row, int col) const {
  const std::uint32_t c = counts[offset_idx](row, col);
  if (c == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(numerators[offset_idx](row, col)) / c;
}

std::vector<Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>>
patch_affinities(const SegmentTree& tree) {
  const LabelMap labels = tree.leaf_labels();
  const int rows = static_cast<int>(labels.rows());
  const int cols = static_cast<int>(labels.cols());
  const auto& offsets = AffinityNeighborhood::all();
  std::vector<Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>> out;
  out.reserve(offsets.size());
  for (const auto& o : offsets) {
    Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> grid =
        Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            rows, cols, -1);
    for (int r = 0; r < rows; ++r) {
      const int rr = r + o.dy;
      if (rr < 0 || rr >= rows) continue;
      for (int c = 0; c < cols; ++c) {
        const int cc = c + o.dx;
        if (cc < 0 || cc >= cols) continue;
        grid(r, c) = labels(r, c) == labels(rr, cc) ? 1 : 0;
      }
    }
    out.push_back(std::move(grid));
  }
  return out;
}

namespace {

std::vector<int> tile_positions(int extent, int patch, int stride) {
  std::vector<int> pos;
  for (int p = 0;; p += stride) {
    if (p + patch >= extent) {
      pos.push_back(extent - patch);
      break;
    }
    pos.push_back(p);
  }
  return pos;
}

}  // namespace

AffinityField sweep(const Image& image, const InpaintModel& model,
                    const SweepConfig& cfg) {
  validate_image(image);
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  if (cfg.patch_size > rows || cfg.patch_size > cols)
    throw std::invalid_argument("sweep: image smaller than patch");
  if (cfg.stride < 1 || cfg.stride > cfg.patch_size)
    throw std::invalid_argument("sweep: stride must be in [1, patch_size]");
  if (cfg.patch_size <= 27)
    throw std::invalid_argument("sweep: offset exceeds patch");

  const auto row_pos = tile_positions(rows, cfg.patch_size, cfg.stride);
  const auto col_pos = tile_positions(cols, cfg.patch_size, cfg.stride);
  struct PatchJob {
    int pr, pc;
  };
  std::vector<PatchJob> jobs;
  for (const int pr : row_pos)
    for (const int pc : col_pos) jobs.push_back({pr, pc});

  using Int8Grid = Eigen::Array<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<std::vector<Int8Grid>> results(jobs.size());

  auto run_job = [&](std::size_t j) {
    const auto [pr, pc] = jobs[j];
    const Image patch =
        image.block(pr, pc, cfg.patch_size, cfg.patch_size);
    SplitConfig split = cfg.split;
    split.seed = mix_seed(cfg.seed, mix_seed(static_cast<std::uint64_t>(pr),
                                             static_cast<std::uint64_t>(pc)));
    const auto windowed =
        model.crop_window(pr, pc, cfg.patch_size, cfg.patch_size);
    const SegmentTree tree =
        hierarchical_split(windowed ? *windowed : model, patch, split);
    results[j] = patch_affinities(tree);
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < jobs.size();
             j = next.fetch_add(1))
          run_job(j);
      });
    for (auto& t : pool) t.join();
  }

  const auto& offsets = AffinityNeighborhood::all();
  AffinityField field;
  field.rows = rows;
  field.cols = cols;
  field.offsets = offsets;
  using U32Grid = Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;
  for (std::size_t o = 0; o < offsets.size(); ++o) {
    field.numerators.push_back(U32Grid::Zero(rows, cols));
    field.counts.push_back(U32Grid::Zero(rows, cols));
  }
  // Integer accumulation in deterministic patch order.
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto [pr, pc] = jobs[j];
    for (std::size_t o = 0; o < offsets.size(); ++o) {
      const auto& grid = results[j][o];
      for (int r = 0; r < cfg.patch_size; ++r)
        for (int c = 0; c < cfg.patch_size; ++c) {
          const std::int8_t v = grid(r, c);
          if (v < 0) continue;
          field.numerators[o](pr + r, pc + c) += v;
          field.counts[o](pr + r, pc + c) += 1;
        }
    }
  }
  return field;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("iaf: truncated file");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

void write_affinity_file(const std::string& path, const AffinityField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("iaf: cannot write " + path);
  out.write("IAF1", 4);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.rows));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.cols));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.offsets.size()));
  for (const auto& o : field.offsets) {
    write_le<std::int32_t>(out, o.dy);
    write_le<std::int32_t>(out, o.dx);
  }
  for (std::size_t o = 0; o < field.offsets.size(); ++o)
    for (int r = 0; r < field.rows; ++r)
      for (int c = 0; c < field.cols; ++c)
        write_le<float>(out, static_cast<float>(field.weight(o, r, c)));
  for (std::size_t o = 0; o < field.offsets.size(); ++o)
    for (int r = 0; r < field.rows; ++r)
      for (int c = 0; c < field.cols; ++c)
        write_le<std::uint32_t>(out, field.counts[o](r, c));
  if (!out) throw std::runtime_error("iaf: write failed for " + path);
}

AffinityField read_affinity_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("iaf: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "IAF1", 4) != 0)
    throw std::runtime_error("iaf: bad magic in " + path);
  AffinityField field;
  field.rows = static_cast<int>(read_le<std::uint32_t>(in));
  field.cols = static_cast<int>(read_le<std::uint32_t>(in));
  const auto n_offsets = read_le<std::uint32_t>(in);
  for (std::uint32_t o = 0; o < n_offsets; ++o) {
    Offset off;
    off.dy = read_le<std::int32_t>(in);
    off.dx = read_le<std::int32_t>(in);
    field.offsets.push_back(off);
  }
  using U32Grid = Eigen::Array<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Eigen::ArrayXXf> weights;
  for (std::uint32_t o = 0; o < n_offsets; ++o) {
    Eigen::ArrayXXf w(field.rows, field.cols);
    for (int r = 0; r < field.rows; ++r)
      for (int c = 0; c < field.cols; ++c) w(r, c) = read_le<float>(in);
    weights.push_back(std::move(w));
  }
  for (std::uint32_t o = 0; o < n_offsets; ++o) {
    U32Grid cnt(field.rows, field.cols);
    for (int r = 0; r < field.rows; ++r)
      for (int c = 0; c < field.cols; ++c)
        cnt(r, c) = read_le<std::uint32_t>(in);
    field.counts.push_back(std::move(cnt));
  }
  for (std::uint32_t o = 0; o < n_offsets; ++o) {
    U32Grid num = U32Grid::Zero(field.rows, field.cols);
    for (int r = 0; r < field.rows; ++r)
      for (int c = 0; c < field.cols; ++c) {
        const std::uint32_t cnt = field.counts[o](r, c);
        if (cnt > 0)
          num(r, c) = static_cast<std::uint32_t>(
              std::lround(static_cast<double>(weights[o](r, c)) * cnt));
      }
    field.numerators.push_back(std::move(num));
  }
  return field;
}

}  // namespace igmseg
