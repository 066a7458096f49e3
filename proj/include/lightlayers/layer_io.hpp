#pragma once

#include <filesystem>
#include <string>

#include "lightlayers/model.hpp"

namespace lightlayers {

// File naming for a layer set sharing one stem:
//   <stem>.composed.png  gamma-encoded 8-bit composite
//   <stem>.occ.pfm <stem>.irr.pfm <stem>.alb.pfm <stem>.spec.pfm
//   <stem>.d{0..5}.pfm <stem>.s{0..5}.pfm   (directional variant)
//   <stem>.env{0..5}.pfm                     (split environment maps)
std::filesystem::path layer_path(const std::filesystem::path& stem, const std::string& suffix);

inline std::filesystem::path composed_path(const std::filesystem::path& stem) {
  return layer_path(stem, "composed.png");
}

void write_layers(const std::filesystem::path& stem, const LayerSet& layers);
LayerSet read_layers(const std::filesystem::path& stem);
bool layers_exist(const std::filesystem::path& stem);

// Writes occ/alb plus d0..5/s0..5.
void write_directional_layers(const std::filesystem::path& stem, const DirectionalLayerSet& layers);
DirectionalLayerSet read_directional_layers(const std::filesystem::path& stem);
bool directional_layers_exist(const std::filesystem::path& stem);

}  // namespace lightlayers
