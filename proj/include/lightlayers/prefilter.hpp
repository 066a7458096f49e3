#pragma once

#include <span>
#include <vector>

#include "lightlayers/basis.hpp"

namespace lightlayers {

enum class PrefilterKind { Irradiance, Glossy };

/// Environment map convolved with a reflectance lobe. Irradiance maps are
/// indexed by surface normal, glossy maps by mirror-reflection direction.
struct PrefilteredMap {
  EnvironmentMap map;
  PrefilterKind kind = PrefilterKind::Irradiance;
  double exponent = 1.0;  // Phong exponent n for Glossy
};

inline constexpr int kDefaultPrefilterWidth = 64;
inline constexpr int kDefaultPrefilterHeight = 32;

/// Per output texel direction n: eval_irradiance_sh(project_sh9(env), n).
PrefilteredMap irradiance_map(const EnvironmentMap& env, int width = kDefaultPrefilterWidth,
                              int height = kDefaultPrefilterHeight);

/// Per output texel direction r, the normalized Phong-lobe average
///   P(r) = sum L(w) max(<w,r>,0)^n dOmega / sum max(<w,r>,0)^n dOmega
/// (see GlossyLobe for the evaluation details). Requires n >= 1.
PrefilteredMap glossy_prefilter(const EnvironmentMap& env, double exponent, int width = kDefaultPrefilterWidth,
                                int height = kDefaultPrefilterHeight);

/// Reference irradiance by direct texel summation:
///   (1/pi) sum L(w) max(<w,n>,0) dOmega
Rgb brute_irradiance(const EnvironmentMap& env, const Direction& n);

/// Chain of 2x2 solid-angle-weighted reductions of an environment map.
/// Level 0 is the input. Reduction stops at height 8 or an odd dimension.
class EnvPyramid {
 public:
  explicit EnvPyramid(const EnvironmentMap& env);

  int levels() const { return static_cast<int>(levels_.size()); }
  const EnvironmentMap& level(int i) const { return levels_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<EnvironmentMap> levels_;
};

/// Evaluates the normalized Phong lobe of exponent n over one or more
/// environment maps of identical resolution, sharing the lobe weights.
///
/// Texels whose lobe weight falls below kLobeCutoff (relative to the lobe
/// peak) are skipped, and the sum runs over the coarsest pyramid level whose
/// texel size is at most 1/8 of the lobe radius (never coarser than 64 rows).
/// Wide lobes therefore sum a few thousand texels, narrow ones a handful.
class GlossyLobe {
 public:
  static constexpr double kLobeCutoff = 1e-6;

  GlossyLobe(std::span<const EnvPyramid* const> pyramids, double exponent);
  GlossyLobe(const EnvPyramid& pyramid, double exponent);

  double exponent() const { return exponent_; }
  int level() const { return level_; }
  /// Angular radius of the truncated lobe, in radians.
  double radius() const { return radius_; }

  /// One value per pyramid, written to `out` (size must match).
  void evaluate(const Vec3& unit, std::span<Rgb> out) const;
  Rgb evaluate(const Vec3& unit) const;

 private:
  struct Level {
    int width = 0;
    int height = 0;
    std::vector<double> rowSin, rowCos, rowSolidAngle, colSin, colCos;
  };

  std::vector<const EnvironmentMap*> maps_;
  double exponent_;
  double cosCutoff_;
  double radius_;
  int level_ = 0;
  Level geometry_;
};

}  // namespace lightlayers
