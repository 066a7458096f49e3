#include "lightlayers/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lightlayers/color.hpp"
#include "lightlayers/imageio.hpp"
#include "lightlayers/layer_io.hpp"
#include "lightlayers/parallel.hpp"

namespace lightlayers {

namespace {

template <int N>
double l2_impl(const Image<N>& a, const Image<N>& b) {
  require_same_size(a, b, "l2_loss");
  const auto va = a.values();
  const auto vb = b.values();
  if (va.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = static_cast<double>(va[i]) - vb[i];
    sum += d * d;
  }
  return sum / static_cast<double>(va.size());
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const double c = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable "valid" Gaussian filter of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1;
  const int oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

template <int N>
double ssim_impl(const Image<N>& a, const Image<N>& b, const SsimOptions& o) {
  require_same_size(a, b, "ssim");
  if (o.window < 1 || !(o.sigma > 0.0)) throw std::invalid_argument("invalid SSIM window");
  const int w = a.width();
  const int h = a.height();
  if (w < o.window || h < o.window) {
    throw std::invalid_argument("image " + std::to_string(w) + "x" + std::to_string(h) +
                                " is smaller than the SSIM window");
  }
  const auto k = gaussian_kernel(o.window, o.sigma);
  const double c1 = (o.k1 * o.dynamicRange) * (o.k1 * o.dynamicRange);
  const double c2 = (o.k2 * o.dynamicRange) * (o.k2 * o.dynamicRange);
  const std::size_t n = a.pixel_count();
  double total = 0.0;
  for (int c = 0; c < N; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a.values()[i * N + c];
      y[i] = b.values()[i * N + c];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h, k);
    const auto my = filter_valid(y, w, h, k);
    const auto sxx = filter_valid(xx, w, h, k);
    const auto syy = filter_valid(yy, w, h, k);
    const auto sxy = filter_valid(xy, w, h, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      sum += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mx.size());
  }
  return total / N;
}

template <int N>
double nrmse_impl(const Image<N>& pred, const Image<N>& ref, NrmseNorm norm) {
  require_same_size(pred, ref, "nrmse");
  const auto p = pred.values();
  const auto r = ref.values();
  if (r.empty()) throw std::invalid_argument("nrmse of empty images");
  double err = 0.0;
  double refNorm = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = static_cast<double>(p[i]) - r[i];
    err += d * d;
    refNorm += static_cast<double>(r[i]) * r[i];
    lo = std::min(lo, static_cast<double>(r[i]));
    hi = std::max(hi, static_cast<double>(r[i]));
  }
  if (norm == NrmseNorm::Euclidean) {
    if (!(refNorm > 0.0)) throw std::invalid_argument("nrmse reference has zero norm");
    return std::sqrt(err / refNorm);
  }
  if (!(hi > lo)) throw std::invalid_argument("nrmse reference has zero range");
  return std::sqrt(err / static_cast<double>(r.size())) / (hi - lo);
}

double mean_squared_norm(const ImageRGB& img) {
  const auto v = img.values();
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return sum / static_cast<double>(img.pixel_count());
}

void write_header(std::ostream& out) {
  out << "# lightlayers evaluation report\n"
      << "# l2.*: mean squared per-channel difference, linear units\n"
      << "# recombination.r1..r3: mean per-pixel squared norm of the residual images, linear units\n"
      << "# albedo.dssim, albedo.nrmse: gamma-encoded albedo (gamma 2.0)\n";
}

}  // namespace

double l2_loss(const ImageRGB& a, const ImageRGB& b) { return l2_impl(a, b); }
double l2_loss(const ImageScalar& a, const ImageScalar& b) { return l2_impl(a, b); }

double ssim(const ImageRGB& a, const ImageRGB& b, const SsimOptions& options) { return ssim_impl(a, b, options); }
double ssim(const ImageScalar& a, const ImageScalar& b, const SsimOptions& options) {
  return ssim_impl(a, b, options);
}
double dssim(const ImageRGB& a, const ImageRGB& b, const SsimOptions& options) {
  return (1.0 - ssim(a, b, options)) / 2.0;
}

double nrmse(const ImageRGB& pred, const ImageRGB& ref, NrmseNorm norm) { return nrmse_impl(pred, ref, norm); }
double nrmse(const ImageScalar& pred, const ImageScalar& ref, NrmseNorm norm) {
  return nrmse_impl(pred, ref, norm);
}

std::vector<std::pair<std::string, double>> EvalReport::fields() const {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < kLayerNames.size(); ++i) out.emplace_back(std::string("l2.") + kLayerNames[i], layerL2[i]);
  for (std::size_t i = 0; i < recombination.size(); ++i) {
    out.emplace_back("recombination.r" + std::to_string(i + 1), recombination[i]);
  }
  out.emplace_back("albedo.dssim", albedoDssim);
  out.emplace_back("albedo.nrmse", albedoNrmse);
  return out;
}

EvalReport evaluate_decomposition(const LayerSet& pred, const LayerSet& gt, const ImageRGB& image,
                                  const EvalOptions& options) {
  pred.require_consistent();
  gt.require_consistent();
  require_same_size(pred.occlusion, gt.occlusion, "evaluate_decomposition");
  require_same_size(pred.occlusion, image, "evaluate_decomposition");

  EvalReport report;
  report.layerL2 = {l2_loss(pred.occlusion, gt.occlusion), l2_loss(pred.irradiance, gt.irradiance),
                    l2_loss(pred.albedo, gt.albedo), l2_loss(pred.specular, gt.specular)};
  const Residuals r = recombination_residuals(pred, image, options.residuals);
  report.recombination = {mean_squared_norm(r.composed), mean_squared_norm(r.unoccluded),
                          mean_squared_norm(r.diffuse)};

  const ImageRGB predAlbedo = gamma_encode(pred.albedo, options.gamma);
  const ImageRGB gtAlbedo = gamma_encode(gt.albedo, options.gamma);
  report.albedoDssim = predAlbedo == gtAlbedo ? 0.0 : std::clamp(dssim(predAlbedo, gtAlbedo), 0.0, 1.0);
  report.albedoNrmse = nrmse(predAlbedo, gtAlbedo, options.norm);
  return report;
}

EvalSummary summarize(const std::vector<EvalReport>& reports) {
  EvalSummary summary;
  summary.count = reports.size();
  for (const auto& [key, value] : EvalReport{}.fields()) summary.keys.push_back(key);
  summary.stats.resize(summary.keys.size());
  if (reports.empty()) return summary;
  for (const EvalReport& r : reports) {
    const auto f = r.fields();
    for (std::size_t k = 0; k < f.size(); ++k) summary.stats[k].mean += f[k].second;
  }
  for (MeanStdev& s : summary.stats) s.mean /= static_cast<double>(reports.size());
  for (const EvalReport& r : reports) {
    const auto f = r.fields();
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double d = f[k].second - summary.stats[k].mean;
      summary.stats[k].stdev += d * d;
    }
  }
  for (MeanStdev& s : summary.stats) s.stdev = std::sqrt(s.stdev / static_cast<double>(reports.size()));
  return summary;
}

std::vector<EvalReport> evaluate_batch(const std::vector<EvalJob>& jobs, const EvalOptions& options, int threads) {
  std::vector<EvalReport> reports(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const LayerSet pred = read_layers(jobs[i].pred);
    const LayerSet gt = read_layers(jobs[i].gt);
    const ImageRGB image = jobs[i].image.empty() ? compose(gt) : read_linear_rgb(jobs[i].image);
    reports[i] = evaluate_decomposition(pred, gt, image, options);
  });
  return reports;
}

void write_report(std::ostream& out, const EvalReport& report) {
  write_header(out);
  out << "records=1\n" << std::setprecision(17);
  for (const auto& [key, value] : report.fields()) out << key << '=' << value << '\n';
}

void write_report(std::ostream& out, const EvalSummary& summary) {
  write_header(out);
  out << "records=" << summary.count << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < summary.keys.size(); ++k) {
    out << summary.keys[k] << ".mean=" << summary.stats[k].mean << '\n';
    out << summary.keys[k] << ".stdev=" << summary.stats[k].stdev << '\n';
  }
}

}  // namespace lightlayers
