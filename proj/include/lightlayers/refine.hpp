#pragma once

#include "lightlayers/model.hpp"

namespace lightlayers {

struct RefineConfig {
  int iterations = 100;
  double blendWeight = 0.001;
  double epsilon = kDefaultEpsilon;
  /// Finish with an unblended S solve stored as a signed residual so the
  /// layers recompose to the input exactly.
  bool exactFinalize = true;
  int threads = 1;

  /// Throws std::invalid_argument unless iterations >= 1 and 0 < w <= 1.
  void validate() const;
};

enum class LayerKind { Occlusion, Irradiance, Albedo, Specular };

/// One pixel of a LayerSet, in double precision.
struct PixelLayers {
  double occlusion = 1.0;
  Rgb irradiance;
  Rgb albedo;
  Rgb specular;

  Rgb compose() const { return compose_pixel(occlusion, irradiance, albedo, specular); }
  bool operator==(const PixelLayers&) const = default;
};

/// Closed-form solve of one layer given the pixel color and the other three.
/// Returns `layers` with only `which` replaced. Divisions use max(x, epsilon);
/// the I solve is returned before any chroma lock.
PixelLayers solve_layer(const Rgb& color, const PixelLayers& layers, LayerKind which,
                        double epsilon = kDefaultEpsilon);

/// `reference` rescaled to the luminance of `candidate`. Returns `candidate`
/// when the reference luminance is not positive.
Rgb project_chroma(const Rgb& candidate, const Rgb& reference);

/// Per-pixel refinement loop (solve order S, I, rho, O, each blended into
/// the current value). A pixel that already recomposes to `color` in float
/// precision is returned untouched.
PixelLayers refine_pixel(const Rgb& color, const PixelLayers& init, const RefineConfig& config);

ImageRGB bilinear_upsample(const ImageRGB& img, int width, int height);
ImageScalar bilinear_upsample(const ImageScalar& img, int width, int height);
LayerSet bilinear_upsample(const LayerSet& layers, int width, int height);

/// Lifts `low` to the resolution of the linear image `hd` and refines every
/// pixel independently against it.
LayerSet upsample_layers(const LayerSet& low, const ImageRGB& hd, const RefineConfig& config = {});

}  // namespace lightlayers
