#ifndef IGMSEG_SYNTH_HPP
#define IGMSEG_SYNTH_HPP

#include <cstdint>

#include "igmseg/grid.hpp"
#include "igmseg/model.hpp"

namespace igmseg {

// Generator for blob images whose pixels are conditionally independent
// across instances: instance pixel = shared base intensity + smooth
// within-instance field + independent noise; background pixels are i.i.d.
struct GenConfig {
  int rows = 96;
  int cols = 96;
  int min_instances = 3;
  int max_instances = 5;
  double min_radius = 7.0;
  double max_radius = 14.0;
  double base_mean = 0.6;
  double base_variance = 0.02;
  double corr_length = 12.0;     // wavelength of the within-instance field
  double smooth_amplitude = 0.06;
  double noise_variance = 1e-4;
  double bg_mean = 0.15;
  double bg_variance = 0.004;
  double touch_probability = 0.7;
  std::uint64_t seed = 0;
};

struct SynthSample {
  Image image;
  LabelMap labels;
  Image smooth_field;  // realized per-instance field, 0 on background
  int requested = 0;
  int placed = 0;
};

SynthSample generate(const GenConfig& cfg);

// Oracle sharing the generator's exact conditional law for this sample.
OracleBlobModel make_oracle(const GenConfig& cfg, const SynthSample& sample);

}  // namespace igmseg

#endif
