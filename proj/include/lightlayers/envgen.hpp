#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lightlayers/basis.hpp"

namespace lightlayers {

enum class EnvPreset { Indoor, Outdoor, Studio };

std::string to_string(EnvPreset preset);
std::optional<EnvPreset> parse_env_preset(const std::string& name);

inline constexpr int kDefaultEnvWidth = 512;
inline constexpr int kDefaultEnvHeight = 256;

/// Procedural HDR lat-long map: a sky/ground gradient plus a handful of
/// random soft-edged area lights whose count, size and intensity depend on
/// the preset. Deterministic in (preset, seed, resolution).
EnvironmentMap make_procedural_env(EnvPreset preset, std::uint64_t seed, int width = kDefaultEnvWidth,
                                   int height = kDefaultEnvHeight);

}  // namespace lightlayers
