#include "lightlayers/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lightlayers {

namespace {

constexpr double kMinDistance = 1e-9;
constexpr double kRayOffset = 1e-6;

std::optional<Hit> intersect_shape(const Sphere& s, const Ray& ray, double maxDistance) {
  const Vec3 oc = ray.origin - s.center;
  const double b = dot(oc, ray.direction);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  double t = -b - root;
  if (t <= kMinDistance) t = -b + root;
  if (t <= kMinDistance || t >= maxDistance) return std::nullopt;
  const Vec3 p = ray.origin + t * ray.direction;
  return Hit{t, p, (p - s.center) / s.radius, -1};
}

std::optional<Hit> intersect_shape(const Box& box, const Ray& ray, double maxDistance) {
  double tNear = -std::numeric_limits<double>::infinity();
  double tFar = std::numeric_limits<double>::infinity();
  int nearAxis = 0;
  int farAxis = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.direction[axis];
    const double lo = box.lo[axis];
    const double hi = box.hi[axis];
    if (d == 0.0) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o) / d;
    double t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > tNear) {
      tNear = t0;
      nearAxis = axis;
    }
    if (t1 < tFar) {
      tFar = t1;
      farAxis = axis;
    }
  }
  if (tNear > tFar) return std::nullopt;
  double t = tNear;
  int axis = nearAxis;
  if (t <= kMinDistance) {
    t = tFar;
    axis = farAxis;
  }
  if (t <= kMinDistance || t >= maxDistance) return std::nullopt;

  const Vec3 p = ray.origin + t * ray.direction;
  Vec3 n;
  const double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
  const double sign = p[axis] > mid ? 1.0 : -1.0;
  if (axis == 0) n = {sign, 0, 0};
  if (axis == 1) n = {0, sign, 0};
  if (axis == 2) n = {0, 0, sign};
  return Hit{t, p, n, -1};
}

std::optional<Hit> intersect_shape(const GroundPlane& plane, const Ray& ray, double maxDistance) {
  if (ray.direction.y == 0.0) return std::nullopt;
  const double t = (plane.height - ray.origin.y) / ray.direction.y;
  if (t <= kMinDistance || t >= maxDistance) return std::nullopt;
  const Vec3 p = ray.origin + t * ray.direction;
  return Hit{t, {p.x, plane.height, p.z}, {0, 1, 0}, -1};
}

}  // namespace

Rgb Texture::eval(const Vec3& p) const {
  if (frequency <= 0.0) return a;
  const auto cell = static_cast<long long>(std::floor(p.x * frequency)) +
                    static_cast<long long>(std::floor(p.y * frequency)) +
                    static_cast<long long>(std::floor(p.z * frequency));
  return (cell & 1) ? b : a;
}

Rgb Texture::mean() const { return frequency <= 0.0 ? a : (a + b) / 2.0; }

double gloss_exponent(double xi) { return std::pow(3.0, 10.0 * xi); }

MaterialSample sample_material(Rng& rng) {
  MaterialSample m;
  m.kind = uniform01(rng) < 0.5 ? MaterialKind::Electric : MaterialKind::Dielectric;
  auto color = [&] { return Rgb{uniform(rng, 0.05, 0.95), uniform(rng, 0.05, 0.95), uniform(rng, 0.05, 0.95)}; };
  m.diffuse.a = color();
  if (uniform01(rng) < 0.5) {
    m.diffuse.b = color();
    m.diffuse.frequency = uniform(rng, 2.0, 6.0);
  } else {
    m.diffuse.b = m.diffuse.a;
  }
  const double grey = uniform01(rng);
  m.specular = m.kind == MaterialKind::Electric ? m.diffuse.mean() : Rgb::grey(grey);
  m.glossiness = uniform01(rng);
  m.exponent = gloss_exponent(m.glossiness);
  return m;
}

void Scene::validate() const {
  if (primitives.empty()) throw std::invalid_argument("scene has no primitives");
  for (const Primitive& p : primitives) {
    if (const auto* s = std::get_if<Sphere>(&p.shape); s && !(s->radius > 0.0)) {
      throw std::invalid_argument("degenerate sphere");
    }
    if (const auto* b = std::get_if<Box>(&p.shape)) {
      if (!(b->hi.x > b->lo.x && b->hi.y > b->lo.y && b->hi.z > b->lo.z)) throw std::invalid_argument("degenerate box");
    }
  }
}

std::optional<Hit> Scene::intersect(const Ray& ray, double maxDistance) const {
  std::optional<Hit> best;
  double limit = maxDistance;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    auto hit = std::visit([&](const auto& shape) { return intersect_shape(shape, ray, limit); }, primitives[i].shape);
    if (hit) {
      hit->primitive = static_cast<int>(i);
      limit = hit->distance;
      best = hit;
    }
  }
  return best;
}

bool Scene::occluded(const Ray& ray, double maxDistance) const {
  for (const Primitive& p : primitives) {
    if (std::visit([&](const auto& shape) { return intersect_shape(shape, ray, maxDistance).has_value(); }, p.shape)) {
      return true;
    }
  }
  return false;
}

bool Scene::contains(const Vec3& p) const {
  for (const Primitive& prim : primitives) {
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      if (length(p - s->center) < s->radius) return true;
    } else if (const auto* b = std::get_if<Box>(&prim.shape)) {
      if (p.x > b->lo.x && p.x < b->hi.x && p.y > b->lo.y && p.y < b->hi.y && p.z > b->lo.z && p.z < b->hi.z) {
        return true;
      }
    } else if (const auto* g = std::get_if<GroundPlane>(&prim.shape)) {
      if (p.y < g->height) return true;
    }
  }
  return false;
}

Sphere Scene::bounds() const {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi = -lo;
  bool any = false;
  auto grow = [&](const Vec3& a, const Vec3& b) {
    lo = {std::min(lo.x, a.x), std::min(lo.y, a.y), std::min(lo.z, a.z)};
    hi = {std::max(hi.x, b.x), std::max(hi.y, b.y), std::max(hi.z, b.z)};
    any = true;
  };
  for (const Primitive& prim : primitives) {
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      const Vec3 r{s->radius, s->radius, s->radius};
      grow(s->center - r, s->center + r);
    } else if (const auto* b = std::get_if<Box>(&prim.shape)) {
      grow(b->lo, b->hi);
    }
  }
  if (!any) return {{0, 0, 0}, 1.0};
  const Vec3 center = 0.5 * (lo + hi);
  return {center, length(hi - center)};
}

Ray Camera::primary_ray(double px, double py, int width, int height) const {
  const Vec3 forward = normalize(target - position);
  const Vec3 right = normalize(cross(forward, Vec3{0, 1, 0}));
  const Vec3 up = cross(right, forward);
  const double tanHalf = std::tan(0.5 * verticalFov);
  const double aspect = static_cast<double>(width) / height;
  const double sx = (2.0 * px / width - 1.0) * tanHalf * aspect;
  const double sy = (1.0 - 2.0 * py / height) * tanHalf;
  return {position, normalize(forward + sx * right + sy * up)};
}

namespace {

std::uint32_t reverse_bits(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0f0f0f0fu) | ((x & 0x0f0f0f0fu) << 4);
  x = ((x >> 8) & 0x00ff00ffu) | ((x & 0x00ff00ffu) << 8);
  return (x >> 16) | (x << 16);
}

// Second Sobol dimension (Pascal generator matrix); the first is the bit reversal.
std::uint32_t sobol_dim1(std::uint32_t i) {
  std::uint32_t v = 1u << 31;
  std::uint32_t out = 0;
  for (; i != 0; i >>= 1, v ^= v >> 1) {
    if (i & 1u) out ^= v;
  }
  return out;
}

// Hash-based nested uniform (Owen) scramble after Laine and Karras / Burley.
std::uint32_t owen_scramble(std::uint32_t x, std::uint32_t seed) {
  x = reverse_bits(x);
  x += seed;
  x ^= x * 0x6c50b47cu;
  x ^= x * 0xb82f1e52u;
  x ^= x * 0xc7afe638u;
  x ^= x * 0x8d22f6e6u;
  return reverse_bits(x);
}

}  // namespace

double occlusion(const Scene& scene, const Vec3& point, const Vec3& normal, int samples, double range, Rng& rng) {
  if (samples <= 0) throw std::invalid_argument("occlusion needs at least one sample");
  Vec3 t;
  Vec3 b;
  orthonormal_basis(normal, t, b);
  const Vec3 origin = point + normal * (kRayOffset * std::max(1.0, length(point)));

  const auto shuffle = static_cast<std::uint32_t>(rng());
  const auto seed0 = static_cast<std::uint32_t>(rng());
  const auto seed1 = static_cast<std::uint32_t>(rng());
  int visible = 0;
  for (int i = 0; i < samples; ++i) {
    const std::uint32_t index = owen_scramble(static_cast<std::uint32_t>(i), shuffle);
    const double u1 = owen_scramble(reverse_bits(index), seed0) * 0x1.0p-32;
    const double u2 = owen_scramble(sobol_dim1(index), seed1) * 0x1.0p-32;
    const double r = std::sqrt(u1);
    const double phi = 2.0 * std::numbers::pi * u2;
    const double z = std::sqrt(std::max(0.0, 1.0 - u1));
    const Vec3 dir = normalize(t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + normal * z);
    if (!scene.occluded({origin, dir}, range)) ++visible;
  }
  return static_cast<double>(visible) / samples;
}

std::string to_string(MaterialKind kind) { return kind == MaterialKind::Electric ? "electric" : "dielectric"; }

}  // namespace lightlayers
