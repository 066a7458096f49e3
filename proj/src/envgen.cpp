#include "lightlayers/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lightlayers/rng.hpp"

namespace lightlayers {

namespace {

struct AreaLight {
  Vec3 direction;
  double cosOuter = 0.0;
  double cosInner = 0.0;
  Rgb radiance;
};

struct Gradient {
  Rgb zenith;
  Rgb horizon;
  Rgb ground;
};

Rgb tint(Rng& rng, double warmth) {
  // Blend between a cool and a warm white.
  const double t = uniform(rng, 0.0, warmth);
  return Rgb{0.85 + 0.15 * t, 0.9, 1.0 - 0.3 * t};
}

Vec3 random_direction(Rng& rng, double minElevation, double maxElevation) {
  const double elevation = uniform(rng, minElevation, maxElevation);
  const double azimuth = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return spherical_direction(0.5 * std::numbers::pi - elevation, azimuth);
}

AreaLight make_light(Rng& rng, double minRadiusDeg, double maxRadiusDeg, double minPower, double maxPower,
                     double minElevation, double maxElevation) {
  const double radius = uniform(rng, minRadiusDeg, maxRadiusDeg) * std::numbers::pi / 180.0;
  AreaLight light;
  light.direction = random_direction(rng, minElevation, maxElevation);
  light.cosOuter = std::cos(radius);
  light.cosInner = std::cos(0.6 * radius);
  light.radiance = tint(rng, 1.0) * uniform(rng, minPower, maxPower);
  return light;
}

}  // namespace

std::string to_string(EnvPreset preset) {
  switch (preset) {
    case EnvPreset::Indoor: return "indoor";
    case EnvPreset::Outdoor: return "outdoor";
    case EnvPreset::Studio: return "studio";
  }
  return "unknown";
}

std::optional<EnvPreset> parse_env_preset(const std::string& name) {
  if (name == "indoor") return EnvPreset::Indoor;
  if (name == "outdoor") return EnvPreset::Outdoor;
  if (name == "studio") return EnvPreset::Studio;
  return std::nullopt;
}

EnvironmentMap make_procedural_env(EnvPreset preset, std::uint64_t seed, int width, int height) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(preset)));
  Gradient sky;
  std::vector<AreaLight> lights;
  const double exposure = uniform(rng, 0.5, 2.0);

  switch (preset) {
    case EnvPreset::Outdoor: {
      sky.zenith = Rgb{0.25, 0.45, 0.95} * uniform(rng, 0.6, 1.4);
      sky.horizon = Rgb{0.8, 0.85, 0.95} * uniform(rng, 0.8, 1.2);
      sky.ground = Rgb{uniform(rng, 0.15, 0.35), uniform(rng, 0.12, 0.3), uniform(rng, 0.08, 0.2)};
      lights.push_back(make_light(rng, 2.0, 4.0, 150.0, 600.0, 0.15, 1.3));
      const int clouds = uniform_int(rng, 0, 3);
      for (int i = 0; i < clouds; ++i) lights.push_back(make_light(rng, 10.0, 30.0, 0.5, 2.0, 0.1, 1.2));
      break;
    }
    case EnvPreset::Indoor: {
      const Rgb wall{uniform(rng, 0.3, 0.6), uniform(rng, 0.25, 0.5), uniform(rng, 0.2, 0.45)};
      sky.zenith = wall * 0.8;
      sky.horizon = wall;
      sky.ground = wall * 0.5;
      const int count = uniform_int(rng, 2, 4);
      for (int i = 0; i < count; ++i) lights.push_back(make_light(rng, 8.0, 25.0, 4.0, 25.0, -0.1, 1.4));
      break;
    }
    case EnvPreset::Studio: {
      const double grey = uniform(rng, 0.02, 0.12);
      sky.zenith = Rgb::grey(grey);
      sky.horizon = Rgb::grey(grey * 1.5);
      sky.ground = Rgb::grey(grey * 0.7);
      const int count = uniform_int(rng, 2, 3);
      for (int i = 0; i < count; ++i) lights.push_back(make_light(rng, 12.0, 30.0, 8.0, 40.0, 0.0, 1.2));
      break;
    }
  }

  return EnvironmentMap::from_function(width, height, [&](const Vec3& d) {
    Rgb c;
    if (d.y >= 0.0) {
      const double t = std::sqrt(d.y);
      c = sky.horizon * (1.0 - t) + sky.zenith * t;
    } else {
      const double t = std::min(1.0, -4.0 * d.y);
      c = sky.horizon * (1.0 - t) + sky.ground * t;
    }
    for (const AreaLight& light : lights) {
      const double cosAngle = dot(d, light.direction);
      if (cosAngle <= light.cosOuter) continue;
      const double s = std::clamp((cosAngle - light.cosOuter) / (light.cosInner - light.cosOuter), 0.0, 1.0);
      c += light.radiance * (s * s * (3.0 - 2.0 * s));
    }
    return c * exposure;
  });
}

}  // namespace lightlayers
