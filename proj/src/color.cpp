#include "lightlayers/color.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lightlayers {

namespace {

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
}

}  // namespace

ImageRGB gamma_encode(const ImageRGB& linear, double gamma) {
  require_positive_gamma(gamma);
  ImageRGB out = linear;
  const double inv = 1.0 / gamma;
  for (float& v : out.values()) v = static_cast<float>(std::pow(std::clamp(static_cast<double>(v), 0.0, 1.0), inv));
  out.set_encoding(Encoding::Gamma, gamma);
  return out;
}

ImageRGB gamma_decode(const ImageRGB& encoded, double gamma) {
  require_positive_gamma(gamma);
  ImageRGB out = encoded;
  for (float& v : out.values()) v = static_cast<float>(std::pow(std::max(static_cast<double>(v), 0.0), gamma));
  out.set_encoding(Encoding::Linear);
  return out;
}

ImageScalar luminance_image(const ImageRGB& img) {
  ImageScalar out(img.width(), img.height());
  auto dst = out.values();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) dst[i] = static_cast<float>(luminance(img.rgb_at(i)));
  return out;
}

double luminance_quantile(const ImageRGB& img, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in (0,1]");
  std::vector<double> lum(img.pixel_count());
  for (std::size_t i = 0; i < lum.size(); ++i) lum[i] = luminance(img.rgb_at(i));
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(lum.size())));
  const std::size_t k = std::clamp<std::size_t>(rank, 1, lum.size()) - 1;
  std::nth_element(lum.begin(), lum.begin() + static_cast<std::ptrdiff_t>(k), lum.end());
  return lum[k];
}

ExposureResult exposure_normalize(const ImageRGB& linear, double percentile) {
  double reference = luminance_quantile(linear, percentile);
  if (!(reference > 0.0)) {
    // Mostly-black frames: fall back to the brightest pixel so that any
    // image with some positive luminance still normalizes.
    reference = luminance_quantile(linear, 1.0);
    if (!(reference > 0.0)) throw Error("exposure_normalize: image has no positive luminance");
  }
  const double scale = 1.0 / reference;
  return {scaled(linear, scale), scale};
}

ImageRGB scaled(const ImageRGB& img, double s) {
  ImageRGB out = img;
  for (float& v : out.values()) v = static_cast<float>(static_cast<double>(v) * s);
  return out;
}

ImageRGB quantize8(const ImageRGB& encoded) {
  ImageRGB out = encoded;
  for (float& v : out.values()) {
    v = static_cast<float>(std::lround(std::clamp(static_cast<double>(v), 0.0, 1.0) * 255.0) / 255.0);
  }
  return out;
}

}  // namespace lightlayers
