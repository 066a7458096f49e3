#pragma once

#include <array>
#include <functional>
#include <utility>

#include "lightlayers/image.hpp"
#include "lightlayers/model.hpp"
#include "lightlayers/vec.hpp"

namespace lightlayers {

/// Unit vector. Construction checks the norm to 1e-6.
class Direction {
 public:
  explicit Direction(const Vec3& v);
  /// Normalizes `v`; throws std::invalid_argument for a zero vector.
  static Direction normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }

 private:
  struct Trusted {};
  Direction(const Vec3& v, Trusted) : v_(v) {}
  Vec3 v_;
};

// Cube-face axes in basis order (+x, -x, +y, -y, +z, -z).
inline constexpr std::array<Vec3, kBasisCount> kCubeAxes = {
    Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, -1, 0}, Vec3{0, 0, 1}, Vec3{0, 0, -1}};

inline constexpr double kDefaultSharpness = 20.0;

/// Soft-cube partition of unity:
///   b_i(w) = max(<w, c_i>, 0)^sigma / sum_j max(<w, c_j>, 0)^sigma
class SoftCubeBasis {
 public:
  explicit SoftCubeBasis(double sharpness = kDefaultSharpness);

  double sharpness() const { return sharpness_; }
  double weight(const Vec3& w, int face) const;
  std::array<double, kBasisCount> weights(const Vec3& w) const;

 private:
  double sharpness_;
};

double eval_softcube(const Direction& w, int face, double sharpness = kDefaultSharpness);

// Lat-long parameterization: theta in [0, pi] runs top to bottom from +y,
// phi in [0, 2 pi) runs left to right starting at +x towards +z.
Vec3 spherical_direction(double theta, double phi);
std::pair<double, double> spherical_angles(const Vec3& unit);  // (theta, phi)

/// Lat-long HDR radiance map with width = 2 * height and non-negative,
/// finite texels.
class EnvironmentMap {
 public:
  EnvironmentMap() = default;
  explicit EnvironmentMap(ImageRGB radiance);
  EnvironmentMap(int width, int height);

  static EnvironmentMap from_function(int width, int height, const std::function<Rgb(const Vec3&)>& radiance);

  const ImageRGB& image() const { return radiance_; }
  int width() const { return radiance_.width(); }
  int height() const { return radiance_.height(); }

  Rgb texel(int x, int y) const { return radiance_.rgb(x, y); }
  void set_texel(int x, int y, const Rgb& c);

  double texel_theta(int y) const;
  double texel_phi(int x) const;
  Vec3 texel_direction(int x, int y) const;
  /// Exact solid angle of a texel in row y: (2 pi / W) (cos t0 - cos t1).
  double texel_solid_angle(int y) const;

  Rgb lookup_nearest(const Vec3& unit) const;
  Rgb lookup_bilinear(const Vec3& unit) const;

 private:
  ImageRGB radiance_;
};

/// L_i = L * b_i per texel.
std::array<EnvironmentMap, kBasisCount> split_envmap(const EnvironmentMap& env, const SoftCubeBasis& basis);

/// Order-2 real spherical harmonics, index l * (l + 1) + m:
///   0: Y00  1: Y1-1 (y)  2: Y10 (z)  3: Y11 (x)
///   4: Y2-2 (xy)  5: Y2-1 (yz)  6: Y20 (3z^2 - 1)  7: Y21 (xz)  8: Y22 (x^2 - y^2)
inline constexpr int kShCount = 9;
std::array<double, kShCount> sh9_basis(const Vec3& unit);

struct SH9 {
  std::array<Rgb, kShCount> coeffs{};

  SH9& operator+=(const SH9& o) {
    for (int i = 0; i < kShCount; ++i) coeffs[i] += o.coeffs[i];
    return *this;
  }
};

/// Sum over texels of L(w) Y_lm(w) dOmega.
SH9 project_sh9(const EnvironmentMap& env);

/// Radiance reconstructed from the truncated expansion.
Rgb eval_radiance_sh(const SH9& sh, const Vec3& unit);

/// E(n) = (1/pi) * integral L(w) max(<w, n>, 0) dw, evaluated with the
/// clamped-cosine convolution weights (1, 2/3, 1/4) per band, so a constant
/// map L0 yields exactly L0.
Rgb eval_irradiance_sh(const SH9& sh, const Direction& n);
Rgb eval_irradiance_sh(const SH9& sh, const Vec3& unit);

}  // namespace lightlayers
