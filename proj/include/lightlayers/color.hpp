#pragma once

#include "lightlayers/image.hpp"

namespace lightlayers {

inline constexpr double kDefaultGamma = 2.0;

/// Per channel v -> clamp(v, 0, 1)^(1/gamma). Throws for gamma <= 0.
ImageRGB gamma_encode(const ImageRGB& linear, double gamma = kDefaultGamma);
/// Per channel v -> v^gamma. Throws for gamma <= 0.
ImageRGB gamma_decode(const ImageRGB& encoded, double gamma = kDefaultGamma);

ImageScalar luminance_image(const ImageRGB& img);

/// Nearest-rank quantile of per-pixel luminance over all pixels:
/// the sorted value at index ceil(q * N) - 1.
double luminance_quantile(const ImageRGB& img, double q);

struct ExposureResult {
  ImageRGB image;
  double scale = 1.0;
};

/// Scales the image so that its `percentile` luminance maps to 1.
/// Throws lightlayers::Error for images without any positive luminance.
ExposureResult exposure_normalize(const ImageRGB& linear, double percentile = 0.95);

ImageRGB scaled(const ImageRGB& img, double s);

// 8-bit quantization as stored in PNG files.
ImageRGB quantize8(const ImageRGB& encoded);

}  // namespace lightlayers
