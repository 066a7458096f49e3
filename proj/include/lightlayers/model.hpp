#pragma once

#include <array>

#include "lightlayers/image.hpp"

namespace lightlayers {

inline constexpr int kBasisCount = 6;
inline constexpr double kDefaultEpsilon = 1e-4;

/// Non-directional decomposition C = O * (rho * I + S).
///   occlusion  O    unoccluded fraction in [0,1] (1 = fully visible)
///   irradiance I    diffuse illumination, >= 0
///   albedo     rho  diffuse reflectance in [0,1]
///   specular   S    specular shading, >= 0
struct LayerSet {
  ImageScalar occlusion;
  ImageRGB irradiance;
  ImageRGB albedo;
  ImageRGB specular;

  int width() const { return occlusion.width(); }
  int height() const { return occlusion.height(); }
  /// Throws DimensionMismatch unless all four layers share dimensions.
  void require_consistent() const;
};

/// Six-direction decomposition C = O * (rho * sum_i D_i + sum_i S_i); basis
/// order is (+x, -x, +y, -y, +z, -z).
struct DirectionalLayerSet {
  ImageScalar occlusion;
  ImageRGB albedo;
  std::array<ImageRGB, kBasisCount> diffuse;
  std::array<ImageRGB, kBasisCount> specular;

  int width() const { return occlusion.width(); }
  int height() const { return occlusion.height(); }
  void require_consistent() const;
};

struct IntrinsicPair {
  ImageRGB shading;      // O * I
  ImageRGB reflectance;  // rho
};

constexpr Rgb compose_pixel(double occlusion, const Rgb& irradiance, const Rgb& albedo, const Rgb& specular) {
  return occlusion * (albedo * irradiance + specular);
}

ImageRGB compose(const LayerSet& layers);
ImageRGB compose_directional(const DirectionalLayerSet& layers);

/// Intrinsic-image reduction with S dropped: shading = O * I, reflectance = rho.
IntrinsicPair shading_intrinsic(const LayerSet& layers);

/// Signed recombination residuals, one RGB image each:
///   r1 = C - O (I rho + S)
///   r2 = C / O - (I rho + S)
///   r3 = C / O - S - I rho
/// Divisions by O are guarded with max(O, epsilon).
struct Residuals {
  ImageRGB composed;
  ImageRGB unoccluded;
  ImageRGB diffuse;
};

struct ResidualOptions {
  double epsilon = kDefaultEpsilon;
  /// When set, the O divisor of r2/r3 and the S of r3 come from these
  /// (ground-truth) layers instead of the evaluated ones.
  const LayerSet* reference = nullptr;
};

Residuals recombination_residuals(const LayerSet& layers, const ImageRGB& image, const ResidualOptions& options = {});

}  // namespace lightlayers
