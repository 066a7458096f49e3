#include "lightlayers/prefilter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lightlayers {

using std::numbers::pi;

PrefilteredMap irradiance_map(const EnvironmentMap& env, int width, int height) {
  const SH9 sh = project_sh9(env);
  EnvironmentMap out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgb e = eval_irradiance_sh(sh, out.texel_direction(x, y));
      out.set_texel(x, y, {std::max(e.r, 0.0), std::max(e.g, 0.0), std::max(e.b, 0.0)});
    }
  }
  return {std::move(out), PrefilterKind::Irradiance, 1.0};
}

PrefilteredMap glossy_prefilter(const EnvironmentMap& env, double exponent, int width, int height) {
  const EnvPyramid pyramid(env);
  const GlossyLobe lobe(pyramid, exponent);
  EnvironmentMap out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out.set_texel(x, y, lobe.evaluate(out.texel_direction(x, y)));
  }
  return {std::move(out), PrefilterKind::Glossy, exponent};
}

Rgb brute_irradiance(const EnvironmentMap& env, const Direction& n) {
  Rgb sum;
  for (int y = 0; y < env.height(); ++y) {
    const double dOmega = env.texel_solid_angle(y);
    for (int x = 0; x < env.width(); ++x) {
      const double c = dot(env.texel_direction(x, y), n.vec());
      if (c > 0.0) sum += env.texel(x, y) * (c * dOmega);
    }
  }
  return sum / pi;
}

EnvPyramid::EnvPyramid(const EnvironmentMap& env) {
  levels_.push_back(env);
  while (true) {
    const EnvironmentMap& fine = levels_.back();
    if (fine.height() <= 8 || fine.height() % 2 != 0) break;
    EnvironmentMap coarse(fine.width() / 2, fine.height() / 2);
    for (int y = 0; y < coarse.height(); ++y) {
      const double w0 = fine.texel_solid_angle(2 * y);
      const double w1 = fine.texel_solid_angle(2 * y + 1);
      const double norm = 2.0 * (w0 + w1);
      for (int x = 0; x < coarse.width(); ++x) {
        const Rgb sum = (fine.texel(2 * x, 2 * y) + fine.texel(2 * x + 1, 2 * y)) * w0 +
                        (fine.texel(2 * x, 2 * y + 1) + fine.texel(2 * x + 1, 2 * y + 1)) * w1;
        coarse.set_texel(x, y, sum / norm);
      }
    }
    levels_.push_back(std::move(coarse));
  }
}

GlossyLobe::GlossyLobe(const EnvPyramid& pyramid, double exponent)
    : GlossyLobe(std::span<const EnvPyramid* const>(std::array<const EnvPyramid*, 1>{&pyramid}), exponent) {}

GlossyLobe::GlossyLobe(std::span<const EnvPyramid* const> pyramids, double exponent) : exponent_(exponent) {
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) throw std::invalid_argument("glossy exponent must be >= 1");
  if (pyramids.empty()) throw std::invalid_argument("GlossyLobe needs at least one environment map");

  cosCutoff_ = std::pow(kLobeCutoff, 1.0 / exponent);
  radius_ = std::acos(cosCutoff_);

  const EnvPyramid& first = *pyramids.front();
  constexpr int kMinRows = 64;
  level_ = 0;
  for (int i = 1; i < first.levels(); ++i) {
    const int rows = first.level(i).height();
    if (rows < kMinRows || pi / rows > radius_ / 8.0) break;
    level_ = i;
  }
  for (const EnvPyramid* p : pyramids) {
    if (p->level(0).width() != first.level(0).width() || p->level(0).height() != first.level(0).height()) {
      throw DimensionMismatch("GlossyLobe: environment maps differ in resolution");
    }
    maps_.push_back(&p->level(level_));
  }

  const EnvironmentMap& ref = *maps_.front();
  geometry_.width = ref.width();
  geometry_.height = ref.height();
  for (int y = 0; y < ref.height(); ++y) {
    geometry_.rowSin.push_back(std::sin(ref.texel_theta(y)));
    geometry_.rowCos.push_back(std::cos(ref.texel_theta(y)));
    geometry_.rowSolidAngle.push_back(ref.texel_solid_angle(y));
  }
  for (int x = 0; x < ref.width(); ++x) {
    geometry_.colSin.push_back(std::sin(ref.texel_phi(x)));
    geometry_.colCos.push_back(std::cos(ref.texel_phi(x)));
  }
}

Rgb GlossyLobe::evaluate(const Vec3& unit) const {
  Rgb out;
  evaluate(unit, std::span<Rgb>(&out, 1));
  return out;
}

void GlossyLobe::evaluate(const Vec3& unit, std::span<Rgb> out) const {
  if (out.size() != maps_.size()) throw std::invalid_argument("GlossyLobe::evaluate: output size mismatch");
  std::fill(out.begin(), out.end(), Rgb{});

  const Level& g = geometry_;
  const auto [thetaR, phiR] = spherical_angles(unit);
  const double sinR = std::sin(thetaR);
  const double cosR = std::cos(thetaR);
  const double sinPhiR = std::sin(phiR);
  const double cosPhiR = std::cos(phiR);
  const double dTheta = pi / g.height;
  const double dPhi = 2.0 * pi / g.width;
  const bool coversPole = thetaR - radius_ <= 0.0 || thetaR + radius_ >= pi;

  const int yBegin = std::max(0, static_cast<int>(std::floor((thetaR - radius_) / dTheta - 0.5)));
  const int yEnd = std::min(g.height - 1, static_cast<int>(std::ceil((thetaR + radius_) / dTheta - 0.5)));

  double weightSum = 0.0;
  for (int y = yBegin; y <= yEnd; ++y) {
    // Columns whose centre lies within the cutoff cone:
    // cos(gamma) = cos(t) cos(tR) + sin(t) sin(tR) cos(dphi) >= cosCutoff.
    int xBegin = 0;
    int xCount = g.width;
    if (!coversPole) {
      const double denom = g.rowSin[y] * sinR;
      const double bound = (cosCutoff_ - g.rowCos[y] * cosR) / denom;
      if (bound > 1.0) continue;
      if (bound > -1.0) {
        const double half = std::acos(bound);
        xBegin = static_cast<int>(std::floor((phiR - half) / dPhi - 0.5));
        const int xLast = static_cast<int>(std::ceil((phiR + half) / dPhi - 0.5));
        xCount = std::min(g.width, xLast - xBegin + 1);
      }
    }
    const double rowA = g.rowSin[y] * sinR;
    const double rowB = g.rowCos[y] * cosR;
    for (int k = 0; k < xCount; ++k) {
      const int x = ((xBegin + k) % g.width + g.width) % g.width;
      // cos(phi - phiR) expanded with the precomputed column sines/cosines.
      const double cosDelta = g.colCos[x] * cosPhiR + g.colSin[x] * sinPhiR;
      const double c = rowA * cosDelta + rowB;
      if (c < cosCutoff_ || c <= 0.0) continue;
      const double w = std::exp(exponent_ * std::log(c)) * g.rowSolidAngle[y];
      weightSum += w;
      for (std::size_t m = 0; m < maps_.size(); ++m) out[m] += maps_[m]->texel(x, y) * w;
    }
  }
  if (weightSum <= 0.0) {
    // The cone missed every texel centre; fall back to the nearest texel.
    for (std::size_t m = 0; m < maps_.size(); ++m) out[m] = maps_[m]->lookup_nearest(unit);
    return;
  }
  for (Rgb& v : out) v = v / weightSum;
}

}  // namespace lightlayers
