#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "igmseg/igm.hpp"
#include "igmseg/synth.hpp"

using namespace igmseg;

namespace {

// Independent oracle: KL(p || q) by Simpson quadrature of p(x) log(p/q)(x)
// over p's mean +- 12 standard deviations.
double kl_quadrature(const PixelDistribution& p, const PixelDistribution& q) {
  const double sd = std::sqrt(p.variance);
  const double lo = p.mean - 12.0 * sd;
  const double hi = p.mean + 12.0 * sd;
  const int n = 20000;  // even
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    const double lp = -0.5 * std::log(2.0 * std::numbers::pi * p.variance) -
                      (x - p.mean) * (x - p.mean) / (2.0 * p.variance);
    const double lq = -0.5 * std::log(2.0 * std::numbers::pi * q.variance) -
                      (x - q.mean) * (x - q.mean) / (2.0 * q.variance);
    return std::exp(lp) * (lp - lq);
  };
  double acc = f(lo) + f(hi);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("kl_gaussian closed-form examples") {
  CHECK(kl_gaussian({0.0, 1.0}, {0.0, 1.0}) == 0.0);
  CHECK(kl_gaussian({0.0, 1.0}, {1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
  const double expected = std::log(2.0) + 0.125 - 0.5;  // vq = 4 vp
  CHECK(kl_gaussian({0.0, 1.0}, {0.0, 4.0}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kl_gaussian is non-negative and asymmetric") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> um(-2.0, 2.0);
  std::uniform_real_distribution<double> uv(0.01, 4.0);
  for (int k = 0; k < 200; ++k) {
    const PixelDistribution p{um(rng), uv(rng)};
    const PixelDistribution q{um(rng), uv(rng)};
    CHECK(kl_gaussian(p, q) >= 0.0);
  }
  CHECK(kl_gaussian({0.0, 1.0}, {0.0, 4.0}) !=
        kl_gaussian({0.0, 4.0}, {0.0, 1.0}));
}

TEST_CASE("kl_gaussian matches the quadrature oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> um(-1.5, 1.5);
  std::uniform_real_distribution<double> uv(0.05, 2.0);
  for (int k = 0; k < 50; ++k) {
    const PixelDistribution p{um(rng), uv(rng)};
    const PixelDistribution q{um(rng), uv(rng)};
    CHECK(kl_gaussian(p, q) ==
          doctest::Approx(kl_quadrature(p, q)).epsilon(1e-6));
  }
}

TEST_CASE("kl_gaussian rejects non-finite inputs") {
  CHECK_THROWS(kl_gaussian({std::nan(""), 1.0}, {0.0, 1.0}));
  CHECK_THROWS(
      kl_gaussian({0.0, 1.0}, {std::numeric_limits<double>::infinity(), 1.0}));
}

TEST_CASE("ig_exact vanishes for pixels independent of the mask") {
  // Under the oracle, a background pixel is independent of everything, and an
  // instance pixel is independent of any mask avoiding its instance.
  GenConfig gen;
  gen.seed = 21;
  const SynthSample s = generate(gen);
  const OracleBlobModel oracle = make_oracle(gen, s);
  // Mask = the first instance; restricting to it loses nothing for a
  // background pixel or for a pixel of that same instance.
  PixelMask mask(gen.rows, gen.cols);
  Pixel bg{-1, -1}, own{-1, -1};
  for (int r = 0; r < gen.rows; ++r)
    for (int c = 0; c < gen.cols; ++c) {
      mask(r, c) = s.labels(r, c) == 1;
      if (bg.row < 0 && s.labels(r, c) == 0) bg = {r, c};
      if (own.row < 0 && s.labels(r, c) == 1) own = {r, c};
    }
  REQUIRE(bg.row >= 0);
  REQUIRE(own.row >= 0);
  CHECK(ig_exact(oracle, s.image, bg, mask) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ig_exact(oracle, s.image, own, mask) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ig_exact is positive when the mask hides informative context") {
  GenConfig gen;
  gen.seed = 22;
  const SynthSample s = generate(gen);
  const OracleBlobModel oracle = make_oracle(gen, s);
  // Target: a pixel of instance 1; mask: everything except that instance,
  // so the M-conditional loses all of the instance context.
  Pixel target{-1, -1};
  PixelMask mask(gen.rows, gen.cols);
  for (int r = 0; r < gen.rows; ++r)
    for (int c = 0; c < gen.cols; ++c) {
      mask(r, c) = s.labels(r, c) != 1;
      if (target.row < 0 && s.labels(r, c) == 1) target = {r, c};
    }
  REQUIRE(target.row >= 0);
  CHECK(ig_exact(oracle, s.image, target, mask) > 1e-6);
}

TEST_CASE("rig_surrogate is zero on a constant image") {
  // Residual variance 0 makes both sides predict the constant with the
  // floored variance, so the per-pixel difference is exactly zero.
  const Image img = Image::Constant(12, 12, 0.5);
  const LocalStatsModel model(1.0, 0.5, 0.1, 0.0);
  PixelMask mask = PixelMask::Constant(12, 12, false);
  mask.leftCols(6).setConstant(true);
  const PixelMask band = mask_boundary_band(mask, 2.0);
  const auto targets = mask_pixels(band);
  const RigMap rig = rig_surrogate(model, img, targets, mask);
  REQUIRE(rig.values.size() == targets.size());
  for (const double v : rig.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rig_surrogate sign tracks which side explains the pixel") {
  // Two flat intensity plateaus; a plateau pixel is predicted far better by
  // its own side than by the other plateau.
  Image img(12, 12);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) img(r, c) = c < 6 ? 0.2 : 0.8;
  const LocalStatsModel model(1.0, 0.5, 0.1, 1e-4);
  PixelMask mask = PixelMask::Constant(12, 12, false);
  mask.leftCols(6).setConstant(true);  // mask = left plateau (correct split)
  const auto targets = mask_pixels(mask_boundary_band(mask, 1.0));
  const RigMap rig = rig_surrogate(model, img, targets, mask);
  for (std::size_t k = 0; k < rig.targets.size(); ++k) {
    const bool in_mask = mask(rig.targets[k].row, rig.targets[k].col);
    if (in_mask)
      CHECK(rig.values[k] > 0.0);
    else
      CHECK(rig.values[k] < 0.0);
  }
}

TEST_CASE("rig_surrogate is antisymmetric under mask complement") {
  GenConfig gen;
  gen.rows = 24;
  gen.cols = 24;
  gen.seed = 9;
  const SynthSample s = generate(gen);
  const LocalStatsModel model(1.5, 0.4, 0.05, 0.01);
  std::mt19937_64 rng(31);
  PixelMask mask(24, 24);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < 24; ++c) mask(r, c) = (rng() & 1) != 0;
  const auto targets = mask_pixels(mask_boundary_band(mask, 2.0));
  const RigMap a = rig_surrogate(model, s.image, targets, mask);
  const RigMap b = rig_surrogate(model, s.image, targets, PixelMask(!mask));
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t k = 0; k < a.values.size(); ++k)
    CHECK(a.values[k] == -b.values[k]);
}

TEST_CASE("igm_from_rig hand example") {
  // Two band pixels: one in the mask with rig +2 (mask explains it), one
  // outside with rig -3 (its own side explains it). Energy counts each
  // pixel's rig with sign - on the mask side and + on the complement side.
  RigMap rig;
  rig.targets = {{0, 0}, {0, 1}};
  rig.values = {2.0, -3.0};
  PixelMask mask(1, 2);
  mask << true, false;
  CHECK(igm_from_rig(rig, mask) == doctest::Approx(-2.0 + -3.0).epsilon(1e-15));
  // Moving the second pixel into the mask (where rig says it does not
  // belong) raises the energy.
  PixelMask worse(1, 2);
  worse << true, true;
  CHECK(igm_from_rig(rig, worse) > igm_from_rig(rig, mask));
}

TEST_CASE("igm_banded is invariant under mask complement") {
  GenConfig gen;
  gen.rows = 24;
  gen.cols = 24;
  for (int trial = 0; trial < 5; ++trial) {
    gen.seed = 600 + trial;
    const SynthSample s = generate(gen);
    const LocalStatsModel model(1.5, 0.4, 0.05, 0.01);
    std::mt19937_64 rng(trial);
    PixelMask mask(24, 24);
    for (int r = 0; r < 24; ++r)
      for (int c = 0; c < 24; ++c) mask(r, c) = (rng() & 1) != 0;
    const double a = igm_banded(model, s.image, mask, 2.0);
    const double b = igm_banded(model, s.image, PixelMask(!mask), 2.0);
    CHECK(a == b);
  }
}

TEST_CASE("igm_banded prefers the true boundary over a shifted one") {
  Image img(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) img(r, c) = c < 8 ? 0.2 : 0.8;
  const LocalStatsModel model(1.0, 0.5, 0.1, 1e-4);
  PixelMask truth = PixelMask::Constant(16, 16, false);
  truth.leftCols(8).setConstant(true);
  PixelMask shifted = PixelMask::Constant(16, 16, false);
  shifted.leftCols(10).setConstant(true);
  CHECK(igm_banded(model, img, truth, 3.0) <
        igm_banded(model, img, shifted, 3.0));
}
