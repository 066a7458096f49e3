#include "lightlayers/model.hpp"

#include <algorithm>

namespace lightlayers {

void LayerSet::require_consistent() const {
  require_same_size(occlusion, irradiance, "LayerSet");
  require_same_size(occlusion, albedo, "LayerSet");
  require_same_size(occlusion, specular, "LayerSet");
}

void DirectionalLayerSet::require_consistent() const {
  require_same_size(occlusion, albedo, "DirectionalLayerSet");
  for (int i = 0; i < kBasisCount; ++i) {
    require_same_size(occlusion, diffuse[i], "DirectionalLayerSet");
    require_same_size(occlusion, specular[i], "DirectionalLayerSet");
  }
}

ImageRGB compose(const LayerSet& layers) {
  layers.require_consistent();
  ImageRGB out(layers.width(), layers.height());
  const auto occ = layers.occlusion.values();
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    out.set_rgb_at(i, compose_pixel(occ[i], layers.irradiance.rgb_at(i), layers.albedo.rgb_at(i),
                                    layers.specular.rgb_at(i)));
  }
  return out;
}

ImageRGB compose_directional(const DirectionalLayerSet& layers) {
  layers.require_consistent();
  ImageRGB out(layers.width(), layers.height());
  const auto occ = layers.occlusion.values();
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    Rgb diffuse;
    Rgb specular;
    for (int k = 0; k < kBasisCount; ++k) {
      diffuse += layers.diffuse[k].rgb_at(i);
      specular += layers.specular[k].rgb_at(i);
    }
    out.set_rgb_at(i, compose_pixel(occ[i], diffuse, layers.albedo.rgb_at(i), specular));
  }
  return out;
}

IntrinsicPair shading_intrinsic(const LayerSet& layers) {
  require_same_size(layers.occlusion, layers.irradiance, "shading_intrinsic");
  require_same_size(layers.occlusion, layers.albedo, "shading_intrinsic");
  IntrinsicPair out{ImageRGB(layers.width(), layers.height()), layers.albedo};
  const auto occ = layers.occlusion.values();
  for (std::size_t i = 0; i < out.shading.pixel_count(); ++i) {
    out.shading.set_rgb_at(i, static_cast<double>(occ[i]) * layers.irradiance.rgb_at(i));
  }
  return out;
}

Residuals recombination_residuals(const LayerSet& layers, const ImageRGB& image, const ResidualOptions& options) {
  layers.require_consistent();
  require_same_size(layers.occlusion, image, "recombination_residuals");
  const LayerSet& ref = options.reference ? *options.reference : layers;
  if (options.reference) {
    ref.require_consistent();
    require_same_size(ref.occlusion, image, "recombination_residuals");
  }

  const int w = layers.width();
  const int h = layers.height();
  Residuals out{ImageRGB(w, h), ImageRGB(w, h), ImageRGB(w, h)};
  const auto occ = layers.occlusion.values();
  const auto refOcc = ref.occlusion.values();
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    const Rgb c = image.rgb_at(i);
    const Rgb diffuse = layers.irradiance.rgb_at(i) * layers.albedo.rgb_at(i);
    const Rgb specular = layers.specular.rgb_at(i);
    const Rgb unoccluded = c / std::max<double>(refOcc[i], options.epsilon);
    out.composed.set_rgb_at(i, c - static_cast<double>(occ[i]) * (diffuse + specular));
    out.unoccluded.set_rgb_at(i, unoccluded - (diffuse + specular));
    out.diffuse.set_rgb_at(i, (unoccluded - ref.specular.rgb_at(i)) - diffuse);
  }
  return out;
}

}  // namespace lightlayers
