#include <sstream>

#include "lightlayers/color.hpp"
#include "lightlayers/layer_io.hpp"
#include "lightlayers/metrics.hpp"
#include "test_util.hpp"

using namespace lightlayers;

namespace {

// SSIM by explicit 2D Gaussian-weighted window sums, one window at a time.
double ssim_oracle(const ImageRGB& a, const ImageRGB& b) {
  const int n = 11;
  double g[11][11];
  double gs = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      gs += g[i][j];
    }
  }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + n <= a.height(); ++y0) {
      for (int x0 = 0; x0 + n <= a.width(); ++x0) {
        double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double w = g[i][j] / gs;
            const double x = a(x0 + j, y0 + i, c), y = b(x0 + j, y0 + i, c);
            mx += w * x;
            my += w * y;
            sxx += w * x * x;
            syy += w * y * y;
            sxy += w * x * y;
          }
        }
        const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
        sum += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    }
    total += sum / count;
  }
  return total / 3;
}

}  // namespace

TEST(L2, ExamplesAndOracle) {
  Rng rng(91);
  const ImageRGB a = testutil::random_rgb(9, 7, rng);
  EXPECT_EQ(l2_loss(a, a), 0.0);
  EXPECT_EQ(l2_loss(ImageRGB(3, 3, 0.0f), ImageRGB(3, 3, 1.0f)), 1.0);
  const ImageRGB b = testutil::random_rgb(9, 7, rng);
  double s = 0.0;
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 9; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double d = static_cast<double>(a(x, y, c)) - b(x, y, c);
        s += d * d;
      }
    }
  }
  EXPECT_NEAR(l2_loss(a, b), s / (9 * 7 * 3), 1e-12);
  EXPECT_THROW(l2_loss(a, ImageRGB(9, 8)), DimensionMismatch);
}

TEST(Nrmse, ExamplesAndOracle) {
  Rng rng(92);
  const ImageRGB ref = testutil::random_rgb(8, 8, rng, 0.1, 1.0);
  EXPECT_EQ(nrmse(ref, ref), 0.0);
  EXPECT_NEAR(nrmse(scaled(ref, 2.0), ref), 1.0, 1e-9);
  for (double k : {0.0, 0.5, 3.0}) EXPECT_NEAR(nrmse(scaled(ref, k), ref), std::abs(k - 1.0), 1e-6);
  const ImageRGB pred = testutil::random_rgb(8, 8, rng);
  double e = 0.0, r = 0.0, lo = 1e9, hi = -1e9;
  for (std::size_t i = 0; i < ref.values().size(); ++i) {
    const double d = static_cast<double>(pred.values()[i]) - ref.values()[i];
    e += d * d;
    r += static_cast<double>(ref.values()[i]) * ref.values()[i];
    lo = std::min(lo, static_cast<double>(ref.values()[i]));
    hi = std::max(hi, static_cast<double>(ref.values()[i]));
  }
  EXPECT_NEAR(nrmse(pred, ref), std::sqrt(e / r), 1e-12);
  EXPECT_NEAR(nrmse(pred, ref, NrmseNorm::MinMax), std::sqrt(e / ref.values().size()) / (hi - lo), 1e-12);
  EXPECT_THROW(nrmse(pred, ImageRGB(8, 8)), std::invalid_argument);
  EXPECT_THROW(nrmse(pred, ImageRGB(8, 8, 0.5f), NrmseNorm::MinMax), std::invalid_argument);
}

TEST(Ssim, MatchesWindowOracle) {
  Rng rng(93);
  const ImageRGB a = testutil::random_rgb(20, 16, rng);
  ImageRGB b = a;
  for (float& v : b.values()) v = std::clamp(v + static_cast<float>(uniform(rng, -0.2, 0.2)), 0.0f, 1.0f);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-12);
}

TEST(Dssim, IdentitySymmetryAndAntiCorrelation) {
  Rng rng(94);
  const ImageRGB a = testutil::random_rgb(24, 24, rng);
  const ImageRGB b = testutil::random_rgb(24, 24, rng);
  EXPECT_NEAR(dssim(a, a), 0.0, 1e-15);
  EXPECT_NEAR(dssim(a, b), dssim(b, a), 1e-12);
  EXPECT_GT(dssim(a, b), 0.0);

  ImageRGB bin(32, 32), inv(32, 32);
  for (std::size_t i = 0; i < bin.values().size(); ++i) {
    bin.values()[i] = uniform01(rng) < 0.5 ? 0.0f : 1.0f;
    inv.values()[i] = 1.0f - bin.values()[i];
  }
  EXPECT_GT(dssim(bin, inv), 0.9);
  EXPECT_LE(dssim(bin, inv), 1.0);
  EXPECT_THROW(dssim(ImageRGB(10, 40), ImageRGB(10, 40)), std::invalid_argument);
}

TEST(Evaluate, GroundTruthScoresZero) {
  Rng rng(95);
  const LayerSet gt = testutil::random_layers(16, 16, rng);
  const EvalReport r = evaluate_decomposition(gt, gt, compose(gt));
  for (const auto& [key, value] : r.fields()) EXPECT_LT(value, 1e-10) << key;
  EXPECT_EQ(r.albedoDssim, 0.0);
}

TEST(Evaluate, AlbedoChangeOnlyMovesAlbedoTerms) {
  Rng rng(96);
  const LayerSet gt = testutil::random_layers(16, 16, rng);
  LayerSet pred = gt;
  for (std::size_t i = 0; i < pred.albedo.pixel_count(); ++i) {
    const Rgb c = gt.albedo.rgb_at(i);
    pred.albedo.set_rgb_at(i, {c.g, c.b, c.r});  // hue rotation
  }
  EvalOptions opt;
  const EvalReport r = evaluate_decomposition(pred, gt, compose(pred), opt);
  EXPECT_EQ(r.layerL2[0], 0.0);
  EXPECT_EQ(r.layerL2[1], 0.0);
  EXPECT_GT(r.layerL2[2], 0.0);
  EXPECT_EQ(r.layerL2[3], 0.0);
  EXPECT_LT(r.recombination[0], 1e-10);
  EXPECT_GT(r.albedoDssim, 0.0);
  EXPECT_GT(r.albedoNrmse, 0.0);
}

TEST(Evaluate, RecombinationIsMeanSquaredResidualNorm) {
  Rng rng(97);
  const LayerSet gt = testutil::random_layers(12, 12, rng);
  const ImageRGB img = testutil::random_rgb(12, 12, rng);
  const EvalReport r = evaluate_decomposition(gt, gt, img);
  const Residuals res = recombination_residuals(gt, img);
  double s = 0.0;
  for (float v : res.composed.values()) s += static_cast<double>(v) * v;
  EXPECT_NEAR(r.recombination[0], s / 144.0, 1e-12);
}

TEST(Summary, MeanAndPopulationStdev) {
  EvalReport a, b;
  a.albedoNrmse = 1.0;
  b.albedoNrmse = 3.0;
  const EvalSummary s = summarize({a, b});
  EXPECT_EQ(s.count, 2u);
  const auto it = std::find(s.keys.begin(), s.keys.end(), "albedo.nrmse");
  ASSERT_NE(it, s.keys.end());
  const auto k = static_cast<std::size_t>(it - s.keys.begin());
  EXPECT_DOUBLE_EQ(s.stats[k].mean, 2.0);
  EXPECT_DOUBLE_EQ(s.stats[k].stdev, 1.0);
}

TEST(Report, KeyValueLines) {
  EvalReport r;
  r.layerL2 = {0.5, 0.25, 0.125, 1.0};
  std::ostringstream out;
  write_report(out, r);
  const std::string text = out.str();
  EXPECT_NE(text.find("\nl2.albedo=0.125\n"), std::string::npos);
  EXPECT_NE(text.find("\nrecords=1\n"), std::string::npos);
  std::istringstream in(text);
  std::string line;
  int values = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ASSERT_NE(line.find('='), std::string::npos) << line;
    ++values;
  }
  EXPECT_EQ(values, 1 + 9);
}

TEST(Batch, GroundTruthDirectoryScoresZero) {
  testutil::TempDir dir;
  Rng rng(98);
  std::vector<EvalJob> jobs;
  for (int i = 0; i < 3; ++i) {
    const auto stem = dir / ("r" + std::to_string(i));
    write_layers(stem, testutil::random_layers(12, 12, rng));
    jobs.push_back({stem, stem, {}});
  }
  const EvalSummary s = summarize(evaluate_batch(jobs, {}, 2));
  EXPECT_EQ(s.count, 3u);
  for (const MeanStdev& m : s.stats) {
    EXPECT_LT(m.mean, 1e-10);
    EXPECT_LT(m.stdev, 1e-10);
  }
}
