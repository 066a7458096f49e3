#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lightlayers/rng.hpp"
#include "lightlayers/vec.hpp"

namespace lightlayers {

/// Flat colour (frequency == 0) or a 3D checker alternating `a` and `b`
/// with cell size 1 / frequency. The checker's spatial mean is (a + b) / 2.
struct Texture {
  Rgb a;
  Rgb b;
  double frequency = 0.0;

  Rgb eval(const Vec3& p) const;
  Rgb mean() const;
};

enum class MaterialKind { Electric, Dielectric };

struct MaterialSample {
  Texture diffuse;  // k_d
  Rgb specular;     // k_s
  double glossiness = 0.0;  // xi in [0,1]
  double exponent = 3.0;    // n = 3^(10 xi)
  MaterialKind kind = MaterialKind::Dielectric;
};

/// Phong exponent for glossiness xi: 3^(10 xi), spanning [1, 59049].
double gloss_exponent(double xi);

/// 50/50 electric or dielectric. Electric: k_s is the per-channel spatial
/// mean of the diffuse texture. Dielectric: k_s is a uniform random grey.
MaterialSample sample_material(Rng& rng);

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};
struct Box {
  Vec3 lo;
  Vec3 hi;
};
/// Infinite plane y = height with normal +y.
struct GroundPlane {
  double height = 0.0;
};

using Shape = std::variant<Sphere, Box, GroundPlane>;

struct Primitive {
  Shape shape;
  MaterialSample material;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
};

struct Hit {
  double distance = 0.0;
  Vec3 point;
  Vec3 normal;  // unit, outward
  int primitive = -1;
};

struct Scene {
  std::vector<Primitive> primitives;

  /// Throws std::invalid_argument for an empty scene or degenerate primitives.
  void validate() const;
  std::optional<Hit> intersect(const Ray& ray, double maxDistance) const;
  bool occluded(const Ray& ray, double maxDistance) const;
  bool contains(const Vec3& p) const;
  /// Bounding sphere of the finite primitives (the ground plane is ignored).
  Sphere bounds() const;
  double diameter() const { return 2.0 * bounds().radius; }
};

/// Pinhole camera; rotation is only about the vertical axis plus a fixed
/// downward tilt towards `target`.
struct Camera {
  Vec3 position;
  Vec3 target;
  double verticalFov = 0.7;  // radians

  Ray primary_ray(double px, double py, int width, int height) const;
};

/// Fraction of cosine-weighted hemisphere rays around `normal` that do not
/// hit geometry within `range`. Samples are an Owen-scrambled 2D Sobol set
/// (seeded from `rng`) mapped to the hemisphere by Malley's method.
double occlusion(const Scene& scene, const Vec3& point, const Vec3& normal, int samples, double range, Rng& rng);

std::string to_string(MaterialKind kind);

}  // namespace lightlayers
