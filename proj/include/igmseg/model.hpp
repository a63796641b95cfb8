#ifndef IGMSEG_MODEL_HPP
#define IGMSEG_MODEL_HPP

#include <memory>
#include <string>
#include <vector>

#include "igmseg/grid.hpp"

namespace igmseg {

inline constexpr double kVarianceFloor = 1e-6;

// Per-pixel Gaussian predictive distribution.
struct PixelDistribution {
  double mean = 0.0;
  double variance = kVarianceFloor;
};

double gaussian_nll(double x, const PixelDistribution& d);

// Conditional pixel model p(x_i | x_observed). Predictions for a pixel may
// depend only on observed pixels within fov_radius of it.
class InpaintModel {
 public:
  virtual ~InpaintModel() = default;
  virtual int fov_radius() const = 0;
  // Prediction for (row, col) given the observed mask. The target pixel
  // itself is never conditioned on, whether or not it is marked observed.
  virtual PixelDistribution predict_one(const Image& image,
                                        const PixelMask& observed, int row,
                                        int col) const = 0;
  // Restriction of the model to a window, for models whose predictions
  // depend on absolute position. Translation-invariant models return
  // nullptr and are used as-is on image crops.
  virtual std::unique_ptr<InpaintModel> crop_window(int row0, int col0,
                                                    int rows, int cols) const {
    return nullptr;
  }
};

// Joint prediction for a target set N: every target is predicted from
// observed \ N, never from other targets.
std::vector<PixelDistribution> predict(const InpaintModel& model,
                                       const Image& image,
                                       const PixelMask& observed,
                                       const std::vector<Pixel>& targets);

// Sum of -log p(x_i | observed) over all unobserved pixels.
double inpaint_nll(const InpaintModel& model, const Image& image,
                   const PixelMask& observed);

// Gaussian-kernel local statistics model. The kernel is truncated at
// fov_radius = ceil(3 * bandwidth); with no observed pixel in the FOV the
// prediction falls back to the corpus prior.
class LocalStatsModel : public InpaintModel {
 public:
  LocalStatsModel(double bandwidth, double prior_mean, double prior_variance,
                  double residual_variance);

  int fov_radius() const override { return fov_radius_; }
  PixelDistribution predict_one(const Image& image, const PixelMask& observed,
                                int row, int col) const override;

  // Truncated-kernel weighted mean and total kernel mass over observed
  // pixels; mass 0 signals the prior fallback.
  std::pair<double, double> kernel_stats(const Image& image,
                                         const PixelMask& observed, int row,
                                         int col) const;

  double bandwidth() const { return bandwidth_; }
  double prior_mean() const { return prior_mean_; }
  double prior_variance() const { return prior_variance_; }
  double residual_variance() const { return residual_variance_; }

  void save(const std::string& path) const;
  static LocalStatsModel load(const std::string& path);

 private:
  double bandwidth_;
  double prior_mean_;
  double prior_variance_;
  double residual_variance_;
  int fov_radius_;
};

struct HoldoutSampler {
  int count = 32;           // masks sampled per image per bandwidth
  double min_fraction = 0.1;  // holdout rectangle area, fraction of image
  double max_fraction = 0.5;
};

struct FitResult {
  LocalStatsModel model;
  std::vector<double> mean_nll;  // per bandwidth-grid entry
  bool degenerate_corpus = false;
};

// Selects bandwidth and residual variance minimizing the mean inpainting NLL
// over random rectangular holdout masks. Ties break to the smaller bandwidth.
FitResult fit_local_stats(const std::vector<Image>& images,
                          const std::vector<double>& bandwidth_grid,
                          const HoldoutSampler& sampler, std::uint64_t seed);

// Exact conditional model of the synthetic blob generator. Knows the true
// labels, realized per-instance smooth fields, and the generative parameters;
// cross-instance conditionals reduce to marginals by construction.
class OracleBlobModel : public InpaintModel {
 public:
  OracleBlobModel(LabelMap labels, Image smooth_field, double base_mean,
                  double base_variance, double noise_variance, double bg_mean,
                  double bg_variance, int fov_radius);

  int fov_radius() const override { return fov_radius_; }
  PixelDistribution predict_one(const Image& image, const PixelMask& observed,
                                int row, int col) const override;
  std::unique_ptr<InpaintModel> crop_window(int row0, int col0, int rows,
                                            int cols) const override;

  const LabelMap& labels() const { return labels_; }

 private:
  LabelMap labels_;
  Image smooth_field_;
  double base_mean_;
  double base_variance_;
  double noise_variance_;
  double bg_mean_;
  double bg_variance_;
  int fov_radius_;
};

}  // namespace igmseg

#endif
