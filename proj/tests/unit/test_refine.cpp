#include "lightlayers/refine.hpp"
#include "test_util.hpp"

using namespace lightlayers;

namespace {

PixelLayers random_pixel(Rng& rng) {
  return {uniform(rng, 0.1, 1.0), {uniform(rng, 0, 2), uniform(rng, 0, 2), uniform(rng, 0, 2)},
          {uniform(rng, 0.05, 1), uniform(rng, 0.05, 1), uniform(rng, 0.05, 1)},
          {uniform(rng, 0, 0.5), uniform(rng, 0, 0.5), uniform(rng, 0, 0.5)}};
}

Rgb random_color(Rng& rng, double hi = 1.5) { return {uniform(rng, 0, hi), uniform(rng, 0, hi), uniform(rng, 0, hi)}; }

double sq_err(const Rgb& c, double o, const Rgb& v) {
  const Rgb d = c - o * v;
  return dot(d, d);
}

}  // namespace

TEST(SolveLayer, SpecularWorkedExample) {
  const PixelLayers p{1.0, Rgb::grey(1.0), Rgb::grey(0.5), Rgb{}};
  const PixelLayers s = solve_layer(Rgb::grey(0.6), p, LayerKind::Specular);
  EXPECT_NEAR(s.specular.r, 0.1, 1e-15);
  EXPECT_NEAR(s.specular.b, 0.1, 1e-15);
  EXPECT_EQ(s.irradiance, p.irradiance);
  EXPECT_EQ(s.occlusion, p.occlusion);
}

TEST(SolveLayer, ConsistentPixelReturnsCurrentValues) {
  Rng rng(71);
  for (int i = 0; i < 200; ++i) {
    const PixelLayers p = random_pixel(rng);
    const Rgb c = p.compose();
    for (LayerKind k : {LayerKind::Specular, LayerKind::Irradiance, LayerKind::Albedo, LayerKind::Occlusion}) {
      const PixelLayers s = solve_layer(c, p, k);
      EXPECT_NEAR(s.occlusion, p.occlusion, 1e-12);
      for (int ch = 0; ch < 3; ++ch) {
        EXPECT_NEAR(s.specular[ch], p.specular[ch], 1e-12);
        EXPECT_NEAR(s.irradiance[ch], p.irradiance[ch], 1e-11);
        EXPECT_NEAR(s.albedo[ch], p.albedo[ch], 1e-11);
      }
    }
  }
}

TEST(SolveLayer, OcclusionOfProportionalColourIsExact) {
  Rng rng(72);
  PixelLayers p = random_pixel(rng);
  const Rgb v = p.irradiance * p.albedo + p.specular;
  EXPECT_EQ(solve_layer(0.5 * v, p, LayerKind::Occlusion).occlusion, 0.5);
}

TEST(SolveLayer, OcclusionMatchesBruteForceMinimizer) {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const PixelLayers p = random_pixel(rng);
    const Rgb v = p.irradiance * p.albedo + p.specular;
    const Rgb c = random_color(rng, 0.8);
    // Grid search on [0,1] then golden-section refinement.
    double best = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      if (sq_err(c, i / 1000.0, v) < sq_err(c, best, v)) best = i / 1000.0;
    }
    double lo = std::max(0.0, best - 1e-3), hi = std::min(1.0, best + 1e-3);
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 100; ++i) {
      const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      if (sq_err(c, a, v) < sq_err(c, b, v)) hi = b; else lo = a;
    }
    const double brute = 0.5 * (lo + hi);
    const double solved = std::clamp(solve_layer(c, p, LayerKind::Occlusion).occlusion, 0.0, 1.0);
    EXPECT_NEAR(solved, brute, 1e-6);
  }
}

TEST(SolveLayer, GuardedDivisions) {
  const PixelLayers p{0.0, Rgb{}, Rgb{}, Rgb{}};
  for (LayerKind k : {LayerKind::Specular, LayerKind::Irradiance, LayerKind::Albedo, LayerKind::Occlusion}) {
    const PixelLayers s = solve_layer(Rgb::grey(0.5), p, k, 1e-4);
    EXPECT_TRUE(std::isfinite(s.occlusion));
    for (int c = 0; c < 3; ++c) {
      EXPECT_TRUE(std::isfinite(s.specular[c]));
      EXPECT_TRUE(std::isfinite(s.irradiance[c]));
      EXPECT_TRUE(std::isfinite(s.albedo[c]));
    }
  }
  EXPECT_NEAR(solve_layer(Rgb::grey(0.5), p, LayerKind::Specular, 1e-4).specular.r, 5000.0, 1e-9);
}

TEST(ProjectChroma, Examples) {
  const Rgb ref{0.2, 0.4, 0.6};
  const Rgb got = project_chroma(2.0 * ref, ref);
  EXPECT_NEAR(got.r, 0.4, 1e-15);
  EXPECT_NEAR(got.g, 0.8, 1e-15);
  EXPECT_NEAR(got.b, 1.2, 1e-15);
  EXPECT_EQ(project_chroma(ref, ref), ref);
  const Rgb cand{3, 1, 2};
  EXPECT_EQ(project_chroma(cand, Rgb{}), cand);
}

TEST(ProjectChroma, OutputIsScaledReferenceWithCandidateLuminance) {
  Rng rng(74);
  for (int i = 0; i < 500; ++i) {
    const Rgb ref = random_color(rng) + Rgb::grey(0.01);
    const Rgb cand = random_color(rng, 4.0);
    const Rgb out = project_chroma(cand, ref);
    const double k = out.r / ref.r;
    EXPECT_NEAR(out.g / ref.g, k, 1e-12);
    EXPECT_NEAR(out.b / ref.b, k, 1e-12);
    EXPECT_NEAR(luminance(out), luminance(cand), 1e-12);
  }
}

TEST(RefinePixel, FixedPointOnConsistentInput) {
  Rng rng(75);
  for (int i = 0; i < 200; ++i) {
    PixelLayers p = random_pixel(rng);
    // Float-representable layers, as they would come from an image.
    p.occlusion = static_cast<float>(p.occlusion);
    for (int c = 0; c < 3; ++c) {
      p.irradiance[c] = static_cast<float>(p.irradiance[c]);
      p.albedo[c] = static_cast<float>(p.albedo[c]);
      p.specular[c] = static_cast<float>(p.specular[c]);
    }
    const Rgb cd = p.compose();
    const Rgb c{static_cast<float>(cd.r), static_cast<float>(cd.g), static_cast<float>(cd.b)};
    for (bool finalize : {true, false}) {
      RefineConfig cfg;
      cfg.exactFinalize = finalize;
      EXPECT_EQ(refine_pixel(c, p, cfg), p);
    }
  }
}

TEST(RefinePixel, FinalizeRecomposesExactlyInFloat) {
  Rng rng(76);
  int inexact = 0;
  for (int i = 0; i < 300; ++i) {
    const PixelLayers p = random_pixel(rng);
    const Rgb cd = random_color(rng, 3.0);
    const Rgb c{static_cast<float>(cd.r), static_cast<float>(cd.g), static_cast<float>(cd.b)};
    RefineConfig cfg;
    cfg.iterations = 5;
    const PixelLayers out = refine_pixel(c, p, cfg);
    const Rgb back = out.compose();
    // Float layers cannot always reach every float C (e.g. S < 0 cancelling a
    // large I*rho); those rare channels must still be within 1e-6.
    for (int ch = 0; ch < 3; ++ch) {
      const float got = static_cast<float>(back[ch]);
      const float want = static_cast<float>(c[ch]);
      inexact += got != want;
      EXPECT_LE(std::fabs(got - want), 1e-6);
    }
    EXPECT_GE(out.occlusion, cfg.epsilon);
  }
  EXPECT_LE(inexact, 9);
}

TEST(RefinePixel, LoopReducesErrorAndKeepsRanges) {
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    const PixelLayers p = random_pixel(rng);
    const Rgb c = random_color(rng, 1.0);
    RefineConfig cfg;
    cfg.exactFinalize = false;
    cfg.blendWeight = 0.05;
    const PixelLayers out = refine_pixel(c, p, cfg);
    const Rgb e0 = c - p.compose();
    const Rgb e1 = c - out.compose();
    EXPECT_LE(dot(e1, e1), dot(e0, e0) + 1e-12);
    EXPECT_GE(out.occlusion, 0.0);
    EXPECT_LE(out.occlusion, 1.0);
    for (int ch = 0; ch < 3; ++ch) {
      EXPECT_GE(out.albedo[ch], 0.0);
      EXPECT_LE(out.albedo[ch], 1.0);
      EXPECT_GE(out.irradiance[ch], 0.0);
      EXPECT_GE(out.specular[ch], 0.0);
    }
  }
}

TEST(RefinePixel, IrradianceKeepsInitialChroma) {
  Rng rng(78);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const PixelLayers p = random_pixel(rng);
    const Rgb c = random_color(rng, 1.0);
    RefineConfig cfg;
    cfg.exactFinalize = false;
    const PixelLayers out = refine_pixel(c, p, cfg);
    const double k = out.irradiance.r / p.irradiance.r;
    if (k <= 0.0) continue;  // clamped at zero: a back-projection event
    ++checked;
    EXPECT_NEAR(out.irradiance.g / p.irradiance.g, k, 1e-9 * std::max(1.0, k));
    EXPECT_NEAR(out.irradiance.b / p.irradiance.b, k, 1e-9 * std::max(1.0, k));
  }
  EXPECT_GT(checked, 150);
}

TEST(Bilinear, ConstantAndRampPreserved) {
  ImageRGB c(4, 3, 0.7f);
  const ImageRGB flat = bilinear_upsample(c, 9, 7);
  for (float v : flat.values()) EXPECT_FLOAT_EQ(v, 0.7f);

  // A horizontal ramp in pixel-centre coordinates stays a ramp away from the clamped borders.
  ImageScalar ramp(8, 2);
  for (int x = 0; x < 8; ++x) ramp(x, 0) = ramp(x, 1) = static_cast<float>(x);
  const ImageScalar up = bilinear_upsample(ramp, 16, 4);
  for (int x = 1; x < 15; ++x) EXPECT_NEAR(up(x, 2), (x + 0.5) / 2.0 - 0.5, 1e-6) << x;
  EXPECT_FLOAT_EQ(up(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(up(15, 3), 7.0f);

  ImageRGB same = bilinear_upsample(c, 4, 3);
  EXPECT_EQ(same, c);
}

TEST(Upsample, FixedPointOnConsistentImage) {
  Rng rng(79);
  const LayerSet low = testutil::random_layers(8, 8, rng);
  const LayerSet init = bilinear_upsample(low, 20, 20);
  const ImageRGB hd = compose(init);
  const LayerSet out = upsample_layers(low, hd);
  EXPECT_EQ(out.occlusion, init.occlusion);
  EXPECT_EQ(out.irradiance, init.irradiance);
  EXPECT_EQ(out.albedo, init.albedo);
  EXPECT_EQ(out.specular, init.specular);
}

TEST(Upsample, ExactRecompositionWithBoundedDrift) {
  Rng rng(80);
  const LayerSet low = testutil::random_layers(8, 8, rng);
  // A perturbed high-resolution version of the same content.
  LayerSet truth = bilinear_upsample(low, 16, 16);
  for (float& v : truth.albedo.values()) v = std::clamp(v * static_cast<float>(uniform(rng, 0.9, 1.1)), 0.0f, 1.0f);
  for (float& v : truth.occlusion.values()) v = std::clamp(v + static_cast<float>(uniform(rng, -0.05, 0.05)), 0.1f, 1.0f);
  const ImageRGB hd = compose(truth);

  RefineConfig cfg;
  cfg.threads = 2;
  const LayerSet init = bilinear_upsample(low, 16, 16);
  const LayerSet out = upsample_layers(low, hd, cfg);
  const ImageRGB back = compose(out);
  EXPECT_LT(testutil::max_abs_diff(back, hd), 1e-6);

  // At w = 0.001 the blended layers move only a few percent of the way to
  // their solves; S takes up the remaining mismatch.
  double drift = 0.0, unrefined = 0.0;
  const ImageRGB initC = compose(init);
  for (std::size_t i = 0; i < hd.values().size(); ++i) {
    drift += std::abs(static_cast<double>(out.albedo.values()[i]) - init.albedo.values()[i]) +
             std::abs(static_cast<double>(out.irradiance.values()[i]) - init.irradiance.values()[i]);
    unrefined += std::abs(static_cast<double>(initC.values()[i]) - hd.values()[i]);
  }
  for (std::size_t i = 0; i < hd.pixel_count(); ++i) {
    drift += std::abs(static_cast<double>(out.occlusion.values()[i]) - init.occlusion.values()[i]);
  }
  EXPECT_LT(drift, unrefined);
}

TEST(Upsample, PixelsAreIndependent) {
  Rng rng(81);
  const LayerSet low = testutil::random_layers(4, 4, rng);
  const ImageRGB hd = testutil::random_rgb(8, 8, rng);
  RefineConfig cfg;
  cfg.iterations = 10;
  const LayerSet full = upsample_layers(low, hd, cfg);
  const LayerSet init = bilinear_upsample(low, 8, 8);
  for (std::size_t i : {0u, 13u, 63u}) {
    const PixelLayers p = refine_pixel(hd.rgb_at(i), {init.occlusion.values()[i], init.irradiance.rgb_at(i),
                                                      init.albedo.rgb_at(i), init.specular.rgb_at(i)},
                                       cfg);
    EXPECT_EQ(full.specular.rgb_at(i).g, static_cast<float>(p.specular.g));
    EXPECT_EQ(full.occlusion.values()[i], static_cast<float>(p.occlusion));
  }
}

TEST(Upsample, RejectsBadInputs) {
  Rng rng(82);
  const LayerSet low = testutil::random_layers(8, 8, rng);
  EXPECT_THROW(upsample_layers(low, ImageRGB(4, 16)), DimensionMismatch);
  RefineConfig cfg;
  cfg.blendWeight = 0.0;
  EXPECT_THROW(upsample_layers(low, ImageRGB(16, 16), cfg), std::invalid_argument);
  cfg = {};
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  LayerSet broken = low;
  broken.specular = ImageRGB(3, 3);
  EXPECT_THROW(upsample_layers(broken, ImageRGB(16, 16)), DimensionMismatch);
}
