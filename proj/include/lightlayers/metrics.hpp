#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lightlayers/model.hpp"

namespace lightlayers {

/// Mean squared per-channel difference.
double l2_loss(const ImageRGB& a, const ImageRGB& b);
double l2_loss(const ImageScalar& a, const ImageScalar& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamicRange = 1.0;
};

/// Mean SSIM over all window positions fully inside the image, averaged over
/// channels. Throws std::invalid_argument if the image is smaller than the
/// window.
double ssim(const ImageRGB& a, const ImageRGB& b, const SsimOptions& options = {});
double ssim(const ImageScalar& a, const ImageScalar& b, const SsimOptions& options = {});
/// (1 - SSIM) / 2
double dssim(const ImageRGB& a, const ImageRGB& b, const SsimOptions& options = {});

enum class NrmseNorm { Euclidean, MinMax };

/// Euclidean: |pred - ref| / |ref|. MinMax: RMSE / (max(ref) - min(ref)).
/// Throws std::invalid_argument when the normalizer is zero.
double nrmse(const ImageRGB& pred, const ImageRGB& ref, NrmseNorm norm = NrmseNorm::Euclidean);
double nrmse(const ImageScalar& pred, const ImageScalar& ref, NrmseNorm norm = NrmseNorm::Euclidean);

struct EvalReport {
  static constexpr std::array<const char*, 4> kLayerNames = {"occlusion", "irradiance", "albedo", "specular"};

  std::array<double, 4> layerL2{};
  /// Mean over pixels of |r_k|^2 for r1, r2, r3.
  std::array<double, 3> recombination{};
  double albedoDssim = 0.0;
  double albedoNrmse = 0.0;

  /// Flattened (key, value) pairs in report order.
  std::vector<std::pair<std::string, double>> fields() const;
};

struct EvalOptions {
  NrmseNorm norm = NrmseNorm::Euclidean;
  double gamma = 2.0;
  ResidualOptions residuals;
};

/// Layer L2 in linear units; albedo DSSIM and NRMSE after gamma encoding;
/// recombination residuals of `pred` against the linear image `image`.
EvalReport evaluate_decomposition(const LayerSet& pred, const LayerSet& gt, const ImageRGB& image,
                                  const EvalOptions& options = {});

struct MeanStdev {
  double mean = 0.0;
  double stdev = 0.0;
};

struct EvalSummary {
  std::size_t count = 0;
  std::vector<std::string> keys;
  std::vector<MeanStdev> stats;
};

/// Population mean and standard deviation of every report field.
EvalSummary summarize(const std::vector<EvalReport>& reports);

struct EvalJob {
  std::filesystem::path pred;
  std::filesystem::path gt;
  /// Optional linear or PNG image; defaults to compose(gt).
  std::filesystem::path image;
};

/// Loads and evaluates every job; parallel over jobs, results in job order.
std::vector<EvalReport> evaluate_batch(const std::vector<EvalJob>& jobs, const EvalOptions& options = {},
                                       int threads = 1);

/// key=value lines preceded by '#' comment lines describing the conventions.
void write_report(std::ostream& out, const EvalReport& report);
void write_report(std::ostream& out, const EvalSummary& summary);

}  // namespace lightlayers
