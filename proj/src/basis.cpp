#include "lightlayers/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lightlayers {

using std::numbers::pi;

Direction::Direction(const Vec3& v) : v_(v) {
  if (!(std::abs(length(v) - 1.0) <= 1e-6)) throw std::invalid_argument("Direction: vector is not unit length");
}

Direction Direction::normalized(const Vec3& v) {
  const double len = length(v);
  if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("Direction: cannot normalize zero vector");
  return Direction(v / len, Trusted{});
}

SoftCubeBasis::SoftCubeBasis(double sharpness) : sharpness_(sharpness) {
  if (!(sharpness > 0.0) || !std::isfinite(sharpness)) throw std::invalid_argument("soft-cube sharpness must be > 0");
}

std::array<double, kBasisCount> SoftCubeBasis::weights(const Vec3& w) const {
  // Only one face per axis can have a positive dot product.
  std::array<double, kBasisCount> out{};
  const double comps[3] = {w.x, w.y, w.z};
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double c = comps[axis];
    if (c > 0.0) {
      out[2 * axis] = std::pow(c, sharpness_);
    } else if (c < 0.0) {
      out[2 * axis + 1] = std::pow(-c, sharpness_);
    }
    total += out[2 * axis] + out[2 * axis + 1];
  }
  for (double& v : out) v /= total;
  return out;
}

double SoftCubeBasis::weight(const Vec3& w, int face) const {
  if (face < 0 || face >= kBasisCount) throw std::out_of_range("soft-cube face index out of range");
  return weights(w)[face];
}

double eval_softcube(const Direction& w, int face, double sharpness) {
  return SoftCubeBasis(sharpness).weight(w.vec(), face);
}

Vec3 spherical_direction(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), std::cos(theta), st * std::sin(phi)};
}

std::pair<double, double> spherical_angles(const Vec3& unit) {
  const double theta = std::acos(std::clamp(unit.y, -1.0, 1.0));
  double phi = std::atan2(unit.z, unit.x);
  if (phi < 0.0) phi += 2.0 * pi;
  return {theta, phi};
}

EnvironmentMap::EnvironmentMap(ImageRGB radiance) : radiance_(std::move(radiance)) {
  if (radiance_.width() != 2 * radiance_.height()) {
    throw std::invalid_argument("environment map must have a 2:1 aspect ratio");
  }
  for (float v : radiance_.values()) {
    if (!(v >= 0.0f) || !std::isfinite(v)) throw Error("environment map radiance must be finite and non-negative");
  }
  radiance_.set_encoding(Encoding::Linear);
}

EnvironmentMap::EnvironmentMap(int width, int height) : EnvironmentMap(ImageRGB(width, height)) {}

EnvironmentMap EnvironmentMap::from_function(int width, int height,
                                             const std::function<Rgb(const Vec3&)>& radiance) {
  EnvironmentMap env(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) env.set_texel(x, y, radiance(env.texel_direction(x, y)));
  }
  return env;
}

void EnvironmentMap::set_texel(int x, int y, const Rgb& c) {
  if (!(c.r >= 0.0 && c.g >= 0.0 && c.b >= 0.0) || !std::isfinite(c.r + c.g + c.b)) {
    throw Error("environment map radiance must be finite and non-negative");
  }
  radiance_.set_rgb(x, y, c);
}

double EnvironmentMap::texel_theta(int y) const { return (y + 0.5) * pi / height(); }
double EnvironmentMap::texel_phi(int x) const { return (x + 0.5) * 2.0 * pi / width(); }

Vec3 EnvironmentMap::texel_direction(int x, int y) const {
  return spherical_direction(texel_theta(y), texel_phi(x));
}

double EnvironmentMap::texel_solid_angle(int y) const {
  // Exact area of the latitude band, so rows sum to 4 pi at any resolution.
  const double t0 = pi * y / height();
  const double t1 = pi * (y + 1) / height();
  return (2.0 * pi / width()) * (std::cos(t0) - std::cos(t1));
}

Rgb EnvironmentMap::lookup_nearest(const Vec3& unit) const {
  const auto [theta, phi] = spherical_angles(unit);
  const int x = std::clamp(static_cast<int>(phi / (2.0 * pi) * width()), 0, width() - 1);
  const int y = std::clamp(static_cast<int>(theta / pi * height()), 0, height() - 1);
  return texel(x, y);
}

Rgb EnvironmentMap::lookup_bilinear(const Vec3& unit) const {
  const auto [theta, phi] = spherical_angles(unit);
  const double fx = phi / (2.0 * pi) * width() - 0.5;
  const double fy = std::clamp(theta / pi * height() - 0.5, 0.0, height() - 1.0);
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0;
  const double ty = fy - y0;
  const int xa = (x0 % width() + width()) % width();
  const int xb = (xa + 1) % width();
  const int y1 = std::min(y0 + 1, height() - 1);
  const Rgb top = texel(xa, y0) * (1.0 - tx) + texel(xb, y0) * tx;
  const Rgb bottom = texel(xa, y1) * (1.0 - tx) + texel(xb, y1) * tx;
  return top * (1.0 - ty) + bottom * ty;
}

std::array<EnvironmentMap, kBasisCount> split_envmap(const EnvironmentMap& env, const SoftCubeBasis& basis) {
  std::array<EnvironmentMap, kBasisCount> out;
  for (auto& m : out) m = EnvironmentMap(env.width(), env.height());
  for (int y = 0; y < env.height(); ++y) {
    for (int x = 0; x < env.width(); ++x) {
      const Rgb radiance = env.texel(x, y);
      const auto w = basis.weights(env.texel_direction(x, y));
      for (int i = 0; i < kBasisCount; ++i) out[i].set_texel(x, y, radiance * w[i]);
    }
  }
  return out;
}

std::array<double, kShCount> sh9_basis(const Vec3& d) {
  return {0.282094791773878,
          0.488602511902920 * d.y,
          0.488602511902920 * d.z,
          0.488602511902920 * d.x,
          1.092548430592079 * d.x * d.y,
          1.092548430592079 * d.y * d.z,
          0.315391565252520 * (3.0 * d.z * d.z - 1.0),
          1.092548430592079 * d.x * d.z,
          0.546274215296040 * (d.x * d.x - d.y * d.y)};
}

SH9 project_sh9(const EnvironmentMap& env) {
  SH9 sh;
  for (int y = 0; y < env.height(); ++y) {
    const double dOmega = env.texel_solid_angle(y);
    for (int x = 0; x < env.width(); ++x) {
      const Rgb weighted = env.texel(x, y) * dOmega;
      const auto basis = sh9_basis(env.texel_direction(x, y));
      for (int i = 0; i < kShCount; ++i) sh.coeffs[i] += weighted * basis[i];
    }
  }
  return sh;
}

Rgb eval_radiance_sh(const SH9& sh, const Vec3& unit) {
  const auto basis = sh9_basis(unit);
  Rgb out;
  for (int i = 0; i < kShCount; ++i) out += sh.coeffs[i] * basis[i];
  return out;
}

Rgb eval_irradiance_sh(const SH9& sh, const Vec3& unit) {
  // Clamped-cosine band weights A_l / pi.
  static constexpr std::array<double, kShCount> kBand = {1.0,       2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 0.25,
                                                         0.25,      0.25,      0.25,      0.25};
  const auto basis = sh9_basis(unit);
  Rgb out;
  for (int i = 0; i < kShCount; ++i) out += sh.coeffs[i] * (kBand[i] * basis[i]);
  return out;
}

Rgb eval_irradiance_sh(const SH9& sh, const Direction& n) { return eval_irradiance_sh(sh, n.vec()); }

}  // namespace lightlayers
