// Command-line pipeline: generate | fit | affinities | segment | evaluate |
// sweep-alpha. The IGMSEG_SEED environment variable overrides config seeds.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "igmseg/affinity.hpp"
#include "igmseg/config.hpp"
#include "igmseg/grid.hpp"
#include "igmseg/metrics.hpp"
#include "igmseg/model.hpp"
#include "igmseg/mws.hpp"
#include "igmseg/synth.hpp"

namespace fs = std::filesystem;
using namespace igmseg;

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("IGMSEG_SEED");
  if (!s || !*s) return std::nullopt;
  return std::stoull(s);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

PixelMask load_foreground(const std::string& path) {
  const LabelMap m = read_label_pgm(path);
  return m > 0;
}

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   const std::string& extension) {
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == extension) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
  const Config cfg = Config::load(config_path);
  GenConfig gen = cfg.gen_config();
  if (auto s = env_seed()) gen.seed = *s;
  const int count = cfg.get_int("gen.count", 1);
  fs::create_directories(out_dir);
  const std::uint64_t base_seed = gen.seed;
  for (int i = 0; i < count; ++i) {
    gen.seed = mix_seed(base_seed, static_cast<std::uint64_t>(i));
    const SynthSample sample = generate(gen);
    char name[64];
    std::snprintf(name, sizeof(name), "img_%03d.pgm", i);
    write_pgm((fs::path(out_dir) / name).string(), sample.image, 65535);
    std::snprintf(name, sizeof(name), "lbl_%03d.pgm", i);
    write_label_pgm((fs::path(out_dir) / name).string(), sample.labels);
    if (sample.placed < sample.requested)
      std::cerr << "warning: image " << i << " placed " << sample.placed
                << " of " << sample.requested << " instances\n";
  }
  std::cout << "wrote " << count << " image/label pairs to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path,
            const std::vector<std::string>& image_paths,
            const std::string& out_path) {
  const Config cfg = Config::load(config_path);
  std::vector<Image> images;
  for (const auto& p : image_paths) images.push_back(read_pgm(p));
  std::uint64_t seed = cfg.get_u64("model.seed", 0);
  if (auto s = env_seed()) seed = *s;
  const FitResult fit = fit_local_stats(images, cfg.bandwidth_grid(),
                                        cfg.holdout_sampler(), seed);
  if (fit.degenerate_corpus)
    std::cerr << "warning: degenerate corpus, prior variance floored\n";
  fit.model.save(out_path);
  std::cout << "fitted bandwidth=" << fit.model.bandwidth()
            << " residual_variance=" << fit.model.residual_variance() << "\n";
  return 0;
}

int cmd_affinities(const std::string& image_path, const std::string& model_path,
                   const std::string& config_path, const std::string& out_path,
                   int workers) {
  const Config cfg = Config::load(config_path);
  const Image image = read_pgm(image_path);
  const LocalStatsModel model = LocalStatsModel::load(model_path);
  SweepConfig sweep_cfg;
  sweep_cfg.patch_size = cfg.get_int("sweep.patch_size", sweep_cfg.patch_size);
  sweep_cfg.stride = cfg.get_int("sweep.stride", sweep_cfg.stride);
  sweep_cfg.seed = cfg.get_u64("sweep.seed", 0);
  sweep_cfg.split = cfg.split_config();
  sweep_cfg.workers = workers;
  if (auto s = env_seed()) sweep_cfg.seed = *s;
  if (sweep_cfg.patch_size <= 27)
    throw std::runtime_error("offset exceeds patch");
  const AffinityField field = sweep(image, model, sweep_cfg);
  write_affinity_file(out_path, field);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_segment(const std::string& iaf_path, double alpha,
                const std::string& fg_path, int min_segment,
                const std::string& out_path) {
  const AffinityField field = read_affinity_file(iaf_path);
  MwsConfig cfg;
  cfg.alpha = alpha;
  cfg.min_segment = min_segment;
  if (!fg_path.empty()) {
    const PixelMask fg = load_foreground(fg_path);
    if (fg.rows() != field.rows || fg.cols() != field.cols)
      throw std::runtime_error("foreground shape mismatch");
    cfg.foreground = fg;
  }
  const EdgeList edges = build_edges(field, cfg);
  LabelMap labels = mutex_watershed(edges);
  if (min_segment > 0) labels = merge_small_segments(labels, field, min_segment);
  write_label_pgm(out_path, labels);
  std::cout << "wrote " << out_path << " (" << labels.maxCoeff()
            << " segments)\n";
  return 0;
}

struct EvalRow {
  std::string name;
  double seg = 0.0;
  std::vector<double> det;
};

std::vector<EvalRow> evaluate_dirs(const std::string& pred_dir,
                                   const std::string& gt_dir,
                                   const std::vector<double>& thresholds,
                                   bool sparse_gt) {
  std::vector<EvalRow> rows;
  for (const auto& pred_path : sorted_files(pred_dir, ".pgm")) {
    const fs::path gt_path = fs::path(gt_dir) / pred_path.filename();
    if (!fs::exists(gt_path))
      throw std::runtime_error("missing ground-truth file: " + gt_path.string());
    const LabelMap pred = read_label_pgm(pred_path.string());
    const LabelMap gt = read_label_pgm(gt_path.string());
    EvalRow row;
    row.name = pred_path.filename().string();
    row.seg = seg_score(gt, pred, sparse_gt);
    row.det = detection_accuracy(gt, pred, thresholds, sparse_gt);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no predictions found in " + pred_dir);
  return rows;
}

void write_report(std::ostream& out, const std::vector<EvalRow>& rows,
                  const std::vector<double>& thresholds) {
  out << "name,seg_score";
  for (const double t : thresholds) out << ",det@" << t;
  out << "\n";
  std::vector<double> mean_det(thresholds.size(), 0.0);
  double mean_seg = 0.0;
  for (const auto& row : rows) {
    out << row.name << "," << row.seg;
    for (std::size_t k = 0; k < row.det.size(); ++k) {
      out << "," << row.det[k];
      mean_det[k] += row.det[k];
    }
    out << "\n";
    mean_seg += row.seg;
  }
  out << "mean," << mean_seg / rows.size();
  for (double d : mean_det) out << "," << d / rows.size();
  out << "\n";
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& thresholds_csv, const std::string& out_csv,
                 bool sparse_gt) {
  const std::vector<double> thresholds =
      thresholds_csv.empty() ? std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9}
                             : parse_list(thresholds_csv);
  const auto rows = evaluate_dirs(pred_dir, gt_dir, thresholds, sparse_gt);
  write_report(std::cout, rows, thresholds);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    write_report(out, rows, thresholds);
  }
  return 0;
}

int cmd_sweep_alpha(const std::string& iaf_dir, const std::string& gt_dir,
                    const std::string& alphas_csv, const std::string& fg_dir,
                    const std::string& out_csv) {
  const std::vector<double> alphas = parse_list(alphas_csv);
  if (alphas.empty()) throw std::runtime_error("empty alpha grid");
  const auto iaf_files = sorted_files(iaf_dir, ".iaf");
  if (iaf_files.empty()) throw std::runtime_error("no .iaf files in " + iaf_dir);

  std::ostringstream table;
  table << "alpha,mean_seg\n";
  double best_alpha = alphas.front();
  double best_seg = -1.0;
  for (const double alpha : alphas) {
    double mean_seg = 0.0;
    for (const auto& iaf_path : iaf_files) {
      const fs::path gt_path =
          fs::path(gt_dir) / (iaf_path.stem().string() + ".pgm");
      if (!fs::exists(gt_path))
        throw std::runtime_error("missing ground-truth file: " + gt_path.string());
      const AffinityField field = read_affinity_file(iaf_path.string());
      const LabelMap gt = read_label_pgm(gt_path.string());
      MwsConfig cfg;
      cfg.alpha = alpha;
      if (!fg_dir.empty()) {
        const fs::path fg_path =
            fs::path(fg_dir) / (iaf_path.stem().string() + ".pgm");
        if (!fs::exists(fg_path))
          throw std::runtime_error("missing foreground file: " + fg_path.string());
        cfg.foreground = load_foreground(fg_path.string());
      }
      const LabelMap pred = mutex_watershed(build_edges(field, cfg));
      mean_seg += seg_score(gt, pred);
    }
    mean_seg /= static_cast<double>(iaf_files.size());
    table << alpha << "," << mean_seg << "\n";
    if (mean_seg > best_seg) {
      best_seg = mean_seg;
      best_alpha = alpha;
    }
  }
  std::cout << table.str();
  std::cout << "best_alpha," << best_alpha << "\n";
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write " + out_csv);
    out << table.str() << "best_alpha," << best_alpha << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised instance separation pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_path, model_path, image_path, fg_path;
  std::string pred_dir, gt_dir, iaf_dir, fg_dir, thresholds, alphas;
  std::vector<std::string> image_paths;
  double alpha = 1.0;
  int workers = 1;
  int min_segment = 0;
  bool sparse_gt = false;

  auto* gen = app.add_subcommand("generate", "Generate synthetic image/label pairs");
  gen->add_option("--config", config_path)->required();
  gen->add_option("--out", out_path)->required();

  auto* fit = app.add_subcommand("fit", "Fit the local-statistics model");
  fit->add_option("--config", config_path)->required();
  fit->add_option("--out", out_path)->required();
  fit->add_option("images", image_paths)->required();

  auto* aff = app.add_subcommand("affinities", "Compute sliding-window affinities");
  aff->add_option("--config", config_path)->required();
  aff->add_option("--model", model_path)->required();
  aff->add_option("--out", out_path)->required();
  aff->add_option("--workers", workers);
  aff->add_option("image", image_path)->required();

  auto* seg = app.add_subcommand("segment", "Mutex-watershed segmentation");
  seg->add_option("--affinities", iaf_dir)->required();
  seg->add_option("--alpha", alpha);
  seg->add_option("--fg", fg_path);
  seg->add_option("--min-segment", min_segment);
  seg->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval->add_option("--pred", pred_dir)->required();
  eval->add_option("--gt", gt_dir)->required();
  eval->add_option("--thresholds", thresholds);
  eval->add_option("--out", out_path);
  eval->add_flag("--sparse-gt", sparse_gt);

  auto* sweepa = app.add_subcommand("sweep-alpha", "Select alpha on validation data");
  sweepa->add_option("--affinities", iaf_dir)->required();
  sweepa->add_option("--gt", gt_dir)->required();
  sweepa->add_option("--alphas", alphas)->required();
  sweepa->add_option("--fg", fg_dir);
  sweepa->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(config_path, out_path);
    if (fit->parsed()) return cmd_fit(config_path, image_paths, out_path);
    if (aff->parsed())
      return cmd_affinities(image_path, model_path, config_path, out_path, workers);
    if (seg->parsed())
      return cmd_segment(iaf_dir, alpha, fg_path, min_segment, out_path);
    if (eval->parsed())
      return cmd_evaluate(pred_dir, gt_dir, thresholds, out_path, sparse_gt);
    if (sweepa->parsed())
      return cmd_sweep_alpha(iaf_dir, gt_dir, alphas, fg_dir, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
