#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lightlayers/basis.hpp"
#include "lightlayers/envgen.hpp"
#include "lightlayers/model.hpp"
#include "lightlayers/prefilter.hpp"
#include "lightlayers/scene.hpp"

namespace lightlayers {

/// Everything derived from one environment map that rendering needs: SH
/// projections and glossy pyramids for the full map and, optionally, for its
/// six soft-cube parts.
class SceneLighting {
 public:
  SceneLighting(EnvironmentMap env, bool directional, double sharpness = kDefaultSharpness);

  const EnvironmentMap& environment() const { return env_; }
  bool directional() const { return directional_; }
  const SoftCubeBasis& basis() const { return basis_; }
  const SH9& sh() const { return sh_[0]; }
  const SH9& split_sh(int i) const { return sh_[static_cast<std::size_t>(i) + 1]; }
  /// Background radiance is limited to this luminance (the map's 0.99
  /// luminance quantile).
  double background_limit() const { return backgroundLimit_; }
  /// Pyramids ordered [full, split 0..5] (split entries only when directional).
  std::span<const EnvPyramid* const> pyramids() const { return pyramidPtrs_; }

  Rgb background(const Vec3& viewDirection) const;

 private:
  EnvironmentMap env_;
  bool directional_;
  SoftCubeBasis basis_;
  std::vector<SH9> sh_;
  std::vector<std::unique_ptr<EnvPyramid>> pyramids_;
  std::vector<const EnvPyramid*> pyramidPtrs_;
  double backgroundLimit_ = 0.0;
};

struct RenderOptions {
  int width = 256;
  int height = 256;
  int occlusionSamples = 256;
  /// Occlusion ray range; <= 0 means occlusionRangeFactor x scene diameter.
  double occlusionRange = 0.0;
  double occlusionRangeFactor = 0.5;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RenderedLayers {
  LayerSet layers;
  std::optional<DirectionalLayerSet> directional;
};

/// Ray-cast ground-truth layers, primary visibility only. For the first
/// surface hit: O from hemisphere occlusion, I from the SH irradiance at the
/// normal, rho = k_d, S = k_s x the normalized Phong lobe of exponent n
/// around the mirror direction. Background pixels get O = 1, I = 0, rho = 0
/// and S = the (luminance-limited) environment along the view ray.
/// Throws std::invalid_argument when the camera sits inside geometry.
RenderedLayers render_layers(const Scene& scene, const SceneLighting& lighting, const Camera& camera,
                             const RenderOptions& options);
RenderedLayers render_layers(const Scene& scene, const EnvironmentMap& env, const Camera& camera,
                             const RenderOptions& options, bool directional = false);

struct SceneSample {
  Scene scene;
  Camera camera;
  EnvPreset preset = EnvPreset::Studio;
  std::uint64_t envSeed = 0;
};

/// 1-3 spheres/boxes resting on y = 0, an optional ground plane, a random
/// preset and a camera orbiting the vertical axis that frames the objects.
SceneSample sample_scene(Rng& rng, const std::vector<EnvPreset>& presets);

LayerSet exposure_scaled(const LayerSet& layers, double scale);
DirectionalLayerSet exposure_scaled(const DirectionalLayerSet& layers, double scale);

struct DatasetConfig {
  int count = 100;
  std::uint64_t seed = 0;
  int resolution = 256;
  int envWidth = kDefaultEnvWidth;
  bool directional = false;
  int occlusionSamples = 256;
  double occlusionRangeFactor = 0.5;
  double sharpness = kDefaultSharpness;
  std::vector<EnvPreset> presets = {EnvPreset::Indoor, EnvPreset::Outdoor, EnvPreset::Studio};
  std::filesystem::path outDir = "data";
  int threads = 1;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Applies the keys present in a YAML config file on top of `config`.
/// Recognized keys: count, seed, resolution, env_width, directional,
/// occlusion_samples, occlusion_range_factor, sharpness, presets (list),
/// out, threads. Unknown keys are rejected.
void apply_config_file(DatasetConfig& config, const std::filesystem::path& path);

struct DatasetRecord {
  std::string stem;
  int index = 0;
  std::uint64_t seed = 0;
  SceneSample sample;
  double exposureScale = 1.0;
  /// Physical (unscaled) layers; stored files hold exposure_scaled copies.
  LayerSet layers;
  std::optional<DirectionalLayerSet> directional;
  /// Gamma-encoded, 8-bit quantized composite as stored in the PNG.
  ImageRGB composed;
};

std::string record_stem(int index);
DatasetRecord generate_record(const DatasetConfig& config, int index);

/// Writes the PNG composite, the exposure-scaled layer PFMs and returns the
/// record's manifest line (one JSON object).
std::string write_record(const std::filesystem::path& outDir, const DatasetRecord& record,
                         const DatasetConfig& config);

inline constexpr const char* kManifestName = "manifest.jsonl";

/// Generates `count` records into config.outDir plus manifest.jsonl. Output
/// is a pure function of the config (thread count included).
std::vector<std::string> generate_dataset(const DatasetConfig& config);

}  // namespace lightlayers
