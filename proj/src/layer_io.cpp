#include "lightlayers/layer_io.hpp"

#include "lightlayers/imageio.hpp"

namespace lightlayers {

namespace fs = std::filesystem;

fs::path layer_path(const fs::path& stem, const std::string& suffix) {
  fs::path p = stem;
  p += "." + suffix;
  return p;
}

void write_layers(const fs::path& stem, const LayerSet& layers) {
  layers.require_consistent();
  write_pfm(layer_path(stem, "occ.pfm"), layers.occlusion);
  write_pfm(layer_path(stem, "irr.pfm"), layers.irradiance);
  write_pfm(layer_path(stem, "alb.pfm"), layers.albedo);
  write_pfm(layer_path(stem, "spec.pfm"), layers.specular);
}

LayerSet read_layers(const fs::path& stem) {
  LayerSet layers{read_pfm_scalar(layer_path(stem, "occ.pfm")), read_pfm_rgb(layer_path(stem, "irr.pfm")),
                  read_pfm_rgb(layer_path(stem, "alb.pfm")), read_pfm_rgb(layer_path(stem, "spec.pfm"))};
  layers.require_consistent();
  return layers;
}

bool layers_exist(const fs::path& stem) {
  for (const char* s : {"occ.pfm", "irr.pfm", "alb.pfm", "spec.pfm"}) {
    if (!fs::exists(layer_path(stem, s))) return false;
  }
  return true;
}

void write_directional_layers(const fs::path& stem, const DirectionalLayerSet& layers) {
  layers.require_consistent();
  write_pfm(layer_path(stem, "occ.pfm"), layers.occlusion);
  write_pfm(layer_path(stem, "alb.pfm"), layers.albedo);
  for (int i = 0; i < kBasisCount; ++i) {
    write_pfm(layer_path(stem, "d" + std::to_string(i) + ".pfm"), layers.diffuse[i]);
    write_pfm(layer_path(stem, "s" + std::to_string(i) + ".pfm"), layers.specular[i]);
  }
}

DirectionalLayerSet read_directional_layers(const fs::path& stem) {
  DirectionalLayerSet layers;
  layers.occlusion = read_pfm_scalar(layer_path(stem, "occ.pfm"));
  layers.albedo = read_pfm_rgb(layer_path(stem, "alb.pfm"));
  for (int i = 0; i < kBasisCount; ++i) {
    layers.diffuse[i] = read_pfm_rgb(layer_path(stem, "d" + std::to_string(i) + ".pfm"));
    layers.specular[i] = read_pfm_rgb(layer_path(stem, "s" + std::to_string(i) + ".pfm"));
  }
  layers.require_consistent();
  return layers;
}

bool directional_layers_exist(const fs::path& stem) {
  if (!fs::exists(layer_path(stem, "occ.pfm")) || !fs::exists(layer_path(stem, "alb.pfm"))) return false;
  for (int i = 0; i < kBasisCount; ++i) {
    if (!fs::exists(layer_path(stem, "d" + std::to_string(i) + ".pfm"))) return false;
    if (!fs::exists(layer_path(stem, "s" + std::to_string(i) + ".pfm"))) return false;
  }
  return true;
}

}  // namespace lightlayers
