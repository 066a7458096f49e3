#include <numbers>

#include "lightlayers/basis.hpp"
#include "test_util.hpp"

using namespace lightlayers;
using std::numbers::pi;

TEST(Direction, ChecksUnitLength) {
  EXPECT_NO_THROW(Direction(Vec3{0, 1, 0}));
  EXPECT_THROW(Direction(Vec3{0, 1.01, 0}), std::invalid_argument);
  EXPECT_THROW(Direction::normalized(Vec3{0, 0, 0}), std::invalid_argument);
  const Direction d = Direction::normalized({3, 0, 4});
  EXPECT_DOUBLE_EQ(d.x(), 0.6);
  EXPECT_DOUBLE_EQ(d.z(), 0.8);
}

TEST(SoftCube, AxisDirectionsSelectOneFace) {
  const SoftCubeBasis basis;
  for (int f = 0; f < kBasisCount; ++f) {
    const auto w = basis.weights(kCubeAxes[f]);
    for (int g = 0; g < kBasisCount; ++g) EXPECT_EQ(w[g], f == g ? 1.0 : 0.0);
  }
}

TEST(SoftCube, PartitionOfUnityOnRandomDirections) {
  Rng rng(31);
  for (double sigma : {1.0, 4.0, 20.0, 80.0}) {
    const SoftCubeBasis basis(sigma);
    for (int i = 0; i < 2000; ++i) {
      const Vec3 w = testutil::random_unit(rng);
      const auto b = basis.weights(w);
      double sum = 0.0;
      for (double v : b) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(SoftCube, MatchesDirectFormula) {
  Rng rng(32);
  for (int i = 0; i < 200; ++i) {
    const Vec3 w = testutil::random_unit(rng);
    double num[6];
    double den = 0.0;
    for (int f = 0; f < 6; ++f) {
      num[f] = std::pow(std::max(dot(w, kCubeAxes[f]), 0.0), 20.0);
      den += num[f];
    }
    for (int f = 0; f < 6; ++f) {
      EXPECT_NEAR(eval_softcube(Direction(w), f), num[f] / den, 1e-12);
    }
  }
  EXPECT_THROW(eval_softcube(Direction(Vec3{1, 0, 0}), 6), std::out_of_range);
  EXPECT_THROW(SoftCubeBasis(0.0), std::invalid_argument);
}

TEST(SoftCube, SymmetricUnderAxisMirror) {
  Rng rng(33);
  const SoftCubeBasis basis;
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = testutil::random_unit(rng);
    const auto a = basis.weights(w);
    const auto b = basis.weights({-w.x, w.y, w.z});
    EXPECT_NEAR(a[0], b[1], 1e-14);
    EXPECT_NEAR(a[2], b[2], 1e-14);
  }
}

TEST(LatLong, DirectionConvention) {
  const Vec3 up = spherical_direction(0.0, 0.0);
  EXPECT_NEAR(up.y, 1.0, 1e-15);
  const Vec3 px = spherical_direction(pi / 2, 0.0);
  EXPECT_NEAR(px.x, 1.0, 1e-15);
  const Vec3 pz = spherical_direction(pi / 2, pi / 2);
  EXPECT_NEAR(pz.z, 1.0, 1e-15);
  Rng rng(34);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = testutil::random_unit(rng);
    const auto [theta, phi] = spherical_angles(w);
    const Vec3 back = spherical_direction(theta, phi);
    EXPECT_NEAR(length(back - w), 0.0, 1e-12);
  }
}

TEST(LatLong, TexelGeometry) {
  const EnvironmentMap env(64, 32);
  EXPECT_DOUBLE_EQ(env.texel_theta(0), 0.5 * pi / 32);
  EXPECT_DOUBLE_EQ(env.texel_phi(0), 0.5 * 2 * pi / 64);
  double total = 0.0;
  for (int y = 0; y < 32; ++y) total += 64 * env.texel_solid_angle(y);
  EXPECT_NEAR(total, 4 * pi, 4 * pi * 2e-3);
  EXPECT_THROW(EnvironmentMap(60, 32), std::invalid_argument);
  ImageRGB neg(8, 4);
  neg(1, 1, 1) = -1.0f;
  EXPECT_THROW(EnvironmentMap{neg}, Error);
}

TEST(LatLong, BilinearLookupOfConstantAndWrap) {
  const EnvironmentMap env =
      EnvironmentMap::from_function(32, 16, [](const Vec3&) { return Rgb{0.25, 0.5, 2.0}; });
  Rng rng(35);
  for (int i = 0; i < 50; ++i) {
    const Rgb c = env.lookup_bilinear(testutil::random_unit(rng));
    EXPECT_NEAR(c.b, 2.0, 1e-6);
  }
  // Points either side of the phi seam interpolate between the first and last column.
  EnvironmentMap seam(8, 4);
  for (int y = 0; y < 4; ++y) seam.set_texel(0, y, Rgb::grey(1.0));
  const Vec3 atSeam = spherical_direction(pi / 2, 0.0);
  EXPECT_NEAR(seam.lookup_bilinear(atSeam).r, 0.5, 1e-9);
}

TEST(Split, PartsSumToInput) {
  Rng rng(36);
  ImageRGB img = testutil::random_rgb(64, 32, rng, 0.0, 10.0);
  const EnvironmentMap env(img);
  const auto parts = split_envmap(env, SoftCubeBasis());
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 64; ++x) {
      Rgb sum;
      for (const auto& p : parts) sum += p.texel(x, y);
      const Rgb in = env.texel(x, y);
      EXPECT_NEAR(sum.r, in.r, 1e-6 * std::max(1.0, in.r));
      EXPECT_NEAR(sum.b, in.b, 1e-6 * std::max(1.0, in.b));
    }
  }
}

namespace {

// Discrete inner products of the SH basis over a lat-long grid.
double sh_gram(int i, int j, int h) {
  const EnvironmentMap grid(2 * h, h);
  double s = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < 2 * h; ++x) {
      const auto b = sh9_basis(grid.texel_direction(x, y));
      s += b[i] * b[j] * grid.texel_solid_angle(y);
    }
  }
  return s;
}

}  // namespace

TEST(SH, BasisOrthonormal) {
  for (int i = 0; i < kShCount; ++i) {
    for (int j = i; j < kShCount; ++j) EXPECT_NEAR(sh_gram(i, j, 128), i == j ? 1.0 : 0.0, 2e-3) << i << "," << j;
  }
}

TEST(SH, BasisIndexOrder) {
  const Vec3 w = Direction::normalized({0.3, -0.5, 0.8}).vec();
  const auto b = sh9_basis(w);
  EXPECT_NEAR(b[0], 0.5 * std::sqrt(1 / pi), 1e-12);
  EXPECT_NEAR(b[1], std::sqrt(3 / (4 * pi)) * w.y, 1e-12);
  EXPECT_NEAR(b[2], std::sqrt(3 / (4 * pi)) * w.z, 1e-12);
  EXPECT_NEAR(b[3], std::sqrt(3 / (4 * pi)) * w.x, 1e-12);
  EXPECT_NEAR(b[4], 0.5 * std::sqrt(15 / pi) * w.x * w.y, 1e-12);
  EXPECT_NEAR(b[6], 0.25 * std::sqrt(5 / pi) * (3 * w.z * w.z - 1), 1e-12);
  EXPECT_NEAR(b[8], 0.25 * std::sqrt(15 / pi) * (w.x * w.x - w.y * w.y), 1e-12);
}

TEST(SH, ConstantMapIrradianceIsItself) {
  const EnvironmentMap env = EnvironmentMap::from_function(128, 64, [](const Vec3&) { return Rgb{1, 2, 3}; });
  const SH9 sh = project_sh9(env);
  Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    const Rgb e = eval_irradiance_sh(sh, testutil::random_unit(rng));
    EXPECT_NEAR(e.r, 1.0, 1e-3);
    EXPECT_NEAR(e.b, 3.0, 3e-3);
  }
}

TEST(SH, LinearMapMatchesAnalyticIrradiance) {
  // L = a + b y  =>  E(n) = a + (2/3) b n_y exactly.
  const double a = 1.0;
  const double b = 0.8;
  const EnvironmentMap env =
      EnvironmentMap::from_function(256, 128, [&](const Vec3& w) { return Rgb::grey(a + b * w.y); });
  const SH9 sh = project_sh9(env);
  Rng rng(38);
  for (int i = 0; i < 30; ++i) {
    const Vec3 n = testutil::random_unit(rng);
    EXPECT_NEAR(eval_irradiance_sh(sh, n).g, a + 2.0 / 3.0 * b * n.y, 1e-3);
  }
}

TEST(SH, RadianceReconstructionOfQuadraticMap) {
  const auto f = [](const Vec3& w) { return Rgb::grey(1.0 + 0.5 * w.x * w.z + 0.3 * w.y * w.y); };
  const EnvironmentMap env = EnvironmentMap::from_function(256, 128, f);
  const SH9 sh = project_sh9(env);
  Rng rng(39);
  for (int i = 0; i < 30; ++i) {
    const Vec3 w = testutil::random_unit(rng);
    EXPECT_NEAR(eval_radiance_sh(sh, w).r, f(w).r, 2e-3);
  }
}
