#include "lightlayers/datagen.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "lightlayers/color.hpp"
#include "lightlayers/imageio.hpp"
#include "lightlayers/layer_io.hpp"
#include "lightlayers/parallel.hpp"

namespace lightlayers {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Rgb clamp_non_negative(const Rgb& c) { return {std::max(c.r, 0.0), std::max(c.g, 0.0), std::max(c.b, 0.0)}; }

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
json to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

json to_json(const MaterialSample& m) {
  return {{"kind", to_string(m.kind)},
          {"kd_a", to_json(m.diffuse.a)},
          {"kd_b", to_json(m.diffuse.b)},
          {"checker_frequency", m.diffuse.frequency},
          {"ks", to_json(m.specular)},
          {"xi", m.glossiness},
          {"n", m.exponent}};
}

json to_json(const Primitive& p) {
  json out;
  if (const auto* s = std::get_if<Sphere>(&p.shape)) {
    out = {{"shape", "sphere"}, {"center", to_json(s->center)}, {"radius", s->radius}};
  } else if (const auto* b = std::get_if<Box>(&p.shape)) {
    out = {{"shape", "box"}, {"lo", to_json(b->lo)}, {"hi", to_json(b->hi)}};
  } else if (const auto* g = std::get_if<GroundPlane>(&p.shape)) {
    out = {{"shape", "plane"}, {"height", g->height}};
  }
  out["material"] = to_json(p.material);
  return out;
}

}  // namespace

SceneLighting::SceneLighting(EnvironmentMap env, bool directional, double sharpness)
    : env_(std::move(env)), directional_(directional), basis_(sharpness) {
  sh_.push_back(project_sh9(env_));
  pyramids_.push_back(std::make_unique<EnvPyramid>(env_));
  if (directional_) {
    for (const EnvironmentMap& part : split_envmap(env_, basis_)) {
      sh_.push_back(project_sh9(part));
      pyramids_.push_back(std::make_unique<EnvPyramid>(part));
    }
  }
  for (const auto& p : pyramids_) pyramidPtrs_.push_back(p.get());
  backgroundLimit_ = luminance_quantile(env_.image(), 0.99);
}

Rgb SceneLighting::background(const Vec3& viewDirection) const {
  const Rgb c = env_.lookup_bilinear(viewDirection);
  const double lum = luminance(c);
  if (lum > backgroundLimit_ && lum > 0.0) return c * (backgroundLimit_ / lum);
  return c;
}

RenderedLayers render_layers(const Scene& scene, const SceneLighting& lighting, const Camera& camera,
                             const RenderOptions& options) {
  scene.validate();
  if (options.width <= 0 || options.height <= 0) throw std::invalid_argument("render resolution must be positive");
  if (options.occlusionSamples <= 0) throw std::invalid_argument("occlusion sample count must be positive");
  if (scene.contains(camera.position)) throw std::invalid_argument("camera is inside scene geometry");

  std::map<double, GlossyLobe> lobes;
  for (const Primitive& p : scene.primitives) {
    lobes.try_emplace(p.material.exponent, lighting.pyramids(), p.material.exponent);
  }
  const double range =
      options.occlusionRange > 0.0 ? options.occlusionRange : options.occlusionRangeFactor * scene.diameter();

  const int w = options.width;
  const int h = options.height;
  const bool directional = lighting.directional();
  RenderedLayers out;
  out.layers = {ImageScalar(w, h), ImageRGB(w, h), ImageRGB(w, h), ImageRGB(w, h)};
  if (directional) {
    DirectionalLayerSet d;
    d.occlusion = ImageScalar(w, h);
    d.albedo = ImageRGB(w, h);
    for (int i = 0; i < kBasisCount; ++i) {
      d.diffuse[i] = ImageRGB(w, h);
      d.specular[i] = ImageRGB(w, h);
    }
    out.directional = std::move(d);
  }

  const std::size_t lobeCount = lighting.pyramids().size();
  parallel_for(static_cast<std::size_t>(h), options.threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    std::vector<Rgb> glossy(lobeCount);
    for (int x = 0; x < w; ++x) {
      const std::size_t pixel = static_cast<std::size_t>(y) * w + x;
      const Ray ray = camera.primary_ray(x + 0.5, y + 0.5, w, h);
      const auto hit = scene.intersect(ray, std::numeric_limits<double>::infinity());

      if (!hit) {
        const Rgb bg = lighting.background(ray.direction);
        out.layers.occlusion.values()[pixel] = 1.0f;
        out.layers.specular.set_rgb_at(pixel, bg);
        if (directional) {
          out.directional->occlusion.values()[pixel] = 1.0f;
          const auto weights = lighting.basis().weights(ray.direction);
          for (int i = 0; i < kBasisCount; ++i) out.directional->specular[i].set_rgb_at(pixel, bg * weights[i]);
        }
        continue;
      }

      const MaterialSample& material = scene.primitives[static_cast<std::size_t>(hit->primitive)].material;
      Vec3 normal = hit->normal;
      if (dot(normal, ray.direction) > 0.0) normal = -normal;

      Rng rng(derive_seed(options.seed, pixel));
      const double occ = occlusion(scene, hit->point, normal, options.occlusionSamples, range, rng);
      const Rgb albedo = material.diffuse.eval(hit->point);
      lobes.at(material.exponent).evaluate(normalize(reflect(ray.direction, normal)), glossy);

      out.layers.occlusion.values()[pixel] = static_cast<float>(occ);
      const Rgb irradiance = clamp_non_negative(eval_irradiance_sh(lighting.sh(), normal));
      out.layers.irradiance.set_rgb_at(pixel, irradiance);
      out.layers.albedo.set_rgb_at(pixel, albedo);
      out.layers.specular.set_rgb_at(pixel, material.specular * glossy[0]);
      if (directional) {
        out.directional->occlusion.values()[pixel] = static_cast<float>(occ);
        out.directional->albedo.set_rgb_at(pixel, albedo);
        // Order-2 SH of a single soft-cube part rings negative away from its
        // face. Clamp each part, then rescale the positive parts per channel so
        // they still sum to I.
        std::array<Rgb, kBasisCount> parts;
        Rgb positive;
        for (int i = 0; i < kBasisCount; ++i) {
          parts[i] = clamp_non_negative(eval_irradiance_sh(lighting.split_sh(i), normal));
          positive += parts[i];
        }
        const Rgb gain{positive.r > 0.0 ? irradiance.r / positive.r : 0.0,
                       positive.g > 0.0 ? irradiance.g / positive.g : 0.0,
                       positive.b > 0.0 ? irradiance.b / positive.b : 0.0};
        for (int i = 0; i < kBasisCount; ++i) {
          out.directional->diffuse[i].set_rgb_at(pixel, parts[i] * gain);
          out.directional->specular[i].set_rgb_at(pixel, material.specular * glossy[static_cast<std::size_t>(i) + 1]);
        }
      }
    }
  });
  return out;
}

RenderedLayers render_layers(const Scene& scene, const EnvironmentMap& env, const Camera& camera,
                             const RenderOptions& options, bool directional) {
  return render_layers(scene, SceneLighting(env, directional), camera, options);
}

SceneSample sample_scene(Rng& rng, const std::vector<EnvPreset>& presets) {
  if (presets.empty()) throw std::invalid_argument("at least one environment preset is required");
  SceneSample sample;
  const int objects = uniform_int(rng, 1, 3);
  for (int i = 0; i < objects; ++i) {
    const double spread = i == 0 ? 0.3 : 1.2;
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double dist = uniform(rng, 0.0, spread);
    const double cx = dist * std::cos(angle);
    const double cz = dist * std::sin(angle);
    Primitive prim;
    if (uniform01(rng) < 0.5) {
      const double r = uniform(rng, 0.35, 0.9);
      prim.shape = Sphere{{cx, r, cz}, r};
    } else {
      const Vec3 half{uniform(rng, 0.25, 0.7), uniform(rng, 0.25, 0.7), uniform(rng, 0.25, 0.7)};
      prim.shape = Box{{cx - half.x, 0.0, cz - half.z}, {cx + half.x, 2.0 * half.y, cz + half.z}};
    }
    prim.material = sample_material(rng);
    sample.scene.primitives.push_back(prim);
  }
  if (uniform01(rng) < 0.6) {
    Primitive ground;
    ground.shape = GroundPlane{0.0};
    ground.material = sample_material(rng);
    sample.scene.primitives.push_back(ground);
  }

  const Sphere bounds = sample.scene.bounds();
  Camera& camera = sample.camera;
  camera.verticalFov = 0.7;
  camera.target = bounds.center;
  const double distance = 1.15 * bounds.radius / std::sin(0.5 * camera.verticalFov);
  const double elevation = uniform(rng, 0.1, 0.6);
  const double azimuth = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  camera.position = bounds.center + distance * Vec3{std::cos(elevation) * std::cos(azimuth), std::sin(elevation),
                                                    std::cos(elevation) * std::sin(azimuth)};
  if (camera.position.y <= 0.05) camera.position.y = 0.05;

  sample.preset = presets[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(presets.size()) - 1))];
  sample.envSeed = rng();
  return sample;
}

LayerSet exposure_scaled(const LayerSet& layers, double scale) {
  return {layers.occlusion, lightlayers::scaled(layers.irradiance, scale), layers.albedo,
          lightlayers::scaled(layers.specular, scale)};
}

DirectionalLayerSet exposure_scaled(const DirectionalLayerSet& layers, double scale) {
  DirectionalLayerSet out = layers;
  for (int i = 0; i < kBasisCount; ++i) {
    out.diffuse[i] = lightlayers::scaled(layers.diffuse[i], scale);
    out.specular[i] = lightlayers::scaled(layers.specular[i], scale);
  }
  return out;
}

void DatasetConfig::validate() const {
  if (count < 0) throw std::invalid_argument("count must be >= 0");
  if (resolution < 8) throw std::invalid_argument("resolution must be >= 8");
  if (envWidth < 16 || envWidth % 2 != 0) throw std::invalid_argument("env_width must be even and >= 16");
  if (occlusionSamples < 1) throw std::invalid_argument("occlusion_samples must be >= 1");
  if (!(occlusionRangeFactor > 0.0)) throw std::invalid_argument("occlusion_range_factor must be > 0");
  if (!(sharpness > 0.0)) throw std::invalid_argument("sharpness must be > 0");
  if (presets.empty()) throw std::invalid_argument("presets must not be empty");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

void apply_config_file(DatasetConfig& config, const fs::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw IoError("cannot open config " + path.string());
  } catch (const YAML::Exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!root.IsMap()) throw FormatError(path.string() + ": config must be a key/value map");

  static const std::set<std::string> known = {"count",     "seed",    "resolution", "env_width",
                                              "directional", "occlusion_samples", "occlusion_range_factor",
                                              "sharpness", "presets", "out",        "threads"};
  try {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!known.contains(key)) throw FormatError(path.string() + ": unknown key '" + key + "'");
    }
    if (root["count"]) config.count = root["count"].as<int>();
    if (root["seed"]) config.seed = root["seed"].as<std::uint64_t>();
    if (root["resolution"]) config.resolution = root["resolution"].as<int>();
    if (root["env_width"]) config.envWidth = root["env_width"].as<int>();
    if (root["directional"]) config.directional = root["directional"].as<bool>();
    if (root["occlusion_samples"]) config.occlusionSamples = root["occlusion_samples"].as<int>();
    if (root["occlusion_range_factor"]) config.occlusionRangeFactor = root["occlusion_range_factor"].as<double>();
    if (root["sharpness"]) config.sharpness = root["sharpness"].as<double>();
    if (root["out"]) config.outDir = root["out"].as<std::string>();
    if (root["threads"]) config.threads = root["threads"].as<int>();
    if (root["presets"]) {
      config.presets.clear();
      for (const auto& item : root["presets"]) {
        const auto name = item.as<std::string>();
        const auto preset = parse_env_preset(name);
        if (!preset) throw FormatError(path.string() + ": unknown preset '" + name + "'");
        config.presets.push_back(*preset);
      }
    }
  } catch (const YAML::Exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string record_stem(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rec_%05d", index);
  return buf;
}

DatasetRecord generate_record(const DatasetConfig& config, int index) {
  config.validate();
  DatasetRecord record;
  record.index = index;
  record.stem = record_stem(index);
  record.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));

  Rng rng(record.seed);
  record.sample = sample_scene(rng, config.presets);
  const SceneLighting lighting(
      make_procedural_env(record.sample.preset, record.sample.envSeed, config.envWidth, config.envWidth / 2),
      config.directional, config.sharpness);

  RenderOptions options;
  options.width = config.resolution;
  options.height = config.resolution;
  options.occlusionSamples = config.occlusionSamples;
  options.occlusionRangeFactor = config.occlusionRangeFactor;
  options.seed = derive_seed(record.seed, 0x0cc1);
  RenderedLayers rendered = render_layers(record.sample.scene, lighting, record.sample.camera, options);

  const ExposureResult exposure = exposure_normalize(compose(rendered.layers));
  record.exposureScale = exposure.scale;
  record.layers = std::move(rendered.layers);
  record.directional = std::move(rendered.directional);
  record.composed = quantize8(gamma_encode(exposure.image, kDefaultGamma));
  return record;
}

std::string write_record(const fs::path& outDir, const DatasetRecord& record, const DatasetConfig& config) {
  const fs::path stem = outDir / record.stem;
  write_png(composed_path(stem), record.composed);
  write_layers(stem, exposure_scaled(record.layers, record.exposureScale));
  if (record.directional) write_directional_layers(stem, exposure_scaled(*record.directional, record.exposureScale));

  json files = json::array({record.stem + ".composed.png", record.stem + ".occ.pfm", record.stem + ".irr.pfm",
                            record.stem + ".alb.pfm", record.stem + ".spec.pfm"});
  if (record.directional) {
    for (int i = 0; i < kBasisCount; ++i) files.push_back(record.stem + ".d" + std::to_string(i) + ".pfm");
    for (int i = 0; i < kBasisCount; ++i) files.push_back(record.stem + ".s" + std::to_string(i) + ".pfm");
  }
  json primitives = json::array();
  for (const Primitive& p : record.sample.scene.primitives) primitives.push_back(to_json(p));
  const Camera& cam = record.sample.camera;
  const json line = {
      {"stem", record.stem},
      {"index", record.index},
      {"seed", record.seed},
      {"resolution", config.resolution},
      {"directional", record.directional.has_value()},
      {"exposure_scale", record.exposureScale},
      {"gamma", kDefaultGamma},
      {"env",
       {{"preset", to_string(record.sample.preset)},
        {"seed", record.sample.envSeed},
        {"width", config.envWidth},
        {"height", config.envWidth / 2}}},
      {"camera", {{"position", to_json(cam.position)}, {"target", to_json(cam.target)}, {"fov", cam.verticalFov}}},
      {"primitives", primitives},
      {"files", files}};
  return line.dump();
}

std::vector<std::string> generate_dataset(const DatasetConfig& config) {
  config.validate();
  std::error_code ec;
  fs::create_directories(config.outDir, ec);
  if (ec) throw IoError("cannot create " + config.outDir.string() + ": " + ec.message());

  std::vector<std::string> lines(static_cast<std::size_t>(config.count));
  parallel_for(lines.size(), config.threads, [&](std::size_t i) {
    const DatasetRecord record = generate_record(config, static_cast<int>(i));
    lines[i] = write_record(config.outDir, record, config);
  });

  const fs::path manifest = config.outDir / kManifestName;
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + manifest.string() + " for writing");
  for (const std::string& line : lines) out << line << '\n';
  if (!out) throw IoError("failed writing " + manifest.string());
  return lines;
}

}  // namespace lightlayers
