#include "lightlayers/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lightlayers/parallel.hpp"

namespace lightlayers {

namespace {

constexpr LayerKind kSolveOrder[] = {LayerKind::Specular, LayerKind::Irradiance, LayerKind::Albedo,
                                     LayerKind::Occlusion};

Rgb guarded_div(const Rgb& a, const Rgb& b, double eps) {
  return {a.r / std::max(b.r, eps), a.g / std::max(b.g, eps), a.b / std::max(b.b, eps)};
}

Rgb clamp_cube(const Rgb& c) {
  return {std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0), std::clamp(c.b, 0.0, 1.0)};
}

Rgb clamp_non_negative(const Rgb& c) { return {std::max(c.r, 0.0), std::max(c.g, 0.0), std::max(c.b, 0.0)}; }

Rgb blend(const Rgb& old, const Rgb& solved, double w) { return old + w * (solved - old); }

Rgb to_float(const Rgb& c) {
  return {static_cast<float>(c.r), static_cast<float>(c.g), static_cast<float>(c.b)};
}

bool recomposes(const Rgb& color, const PixelLayers& p) {
  const Rgb c = p.compose();
  return static_cast<float>(c.r) == static_cast<float>(color.r) &&
         static_cast<float>(c.g) == static_cast<float>(color.g) &&
         static_cast<float>(c.b) == static_cast<float>(color.b);
}

// Float S that brings float(O (I rho + S)) closest to `target`, searched a few
// ulps around C/O - I rho. Returns the residual |got - target| of the result.
double fit_specular(double o, double irr, double alb, float target, float& s) {
  s = static_cast<float>(target / o - irr * alb);
  float best = s;
  double bestErr = INFINITY;
  for (int step = 0; step < 8; ++step) {
    const float got = static_cast<float>(o * (irr * alb + static_cast<double>(s)));
    const double err = std::fabs(static_cast<double>(got) - target);
    if (err < bestErr) {
      bestErr = err;
      best = s;
    }
    if (got == target) break;
    s = std::nextafter(s, got < target ? INFINITY : -INFINITY);
  }
  s = best;
  return bestErr;
}

// S = C/O - I rho, stored in float and nudged by ulps so that the float
// composite lands on the input value. When O * ulp(S) exceeds ulp(C) the S
// grid can straddle C; a few ulp offsets of rho and I are then tried jointly.
void finalize_specular(const Rgb& color, PixelLayers& p, double eps) {
  p.occlusion = static_cast<float>(std::max(p.occlusion, eps));
  p.irradiance = to_float(p.irradiance);
  p.albedo = to_float(p.albedo);
  const double o = p.occlusion;
  constexpr int kReach = 128;
  for (int c = 0; c < 3; ++c) {
    const float target = static_cast<float>(color[c]);
    const float irr0 = static_cast<float>(p.irradiance[c]);
    const float alb0 = static_cast<float>(p.albedo[c]);
    float bestIrr = irr0;
    float bestAlb = alb0;
    float bestS = 0.0f;
    double bestErr = fit_specular(o, irr0, alb0, target, bestS);
    const auto tryLayers = [&](float irr, float alb) {
      float s = 0.0f;
      const double err = fit_specular(o, irr, alb, target, s);
      if (err < bestErr) {
        bestErr = err;
        bestIrr = irr;
        bestAlb = alb;
        bestS = s;
      }
    };
    for (int k = 1; k <= kReach && bestErr > 0.0; ++k) {
      for (float dir : {INFINITY, -INFINITY}) {
        float alb = alb0;
        float irr = irr0;
        for (int j = 0; j < k; ++j) {
          alb = std::nextafter(alb, dir);
          irr = std::nextafter(irr, dir);
        }
        if (alb >= 0.0f && alb <= 1.0f) tryLayers(irr0, alb);
        if (irr >= 0.0f) tryLayers(irr, alb0);
      }
    }
    p.irradiance[c] = bestIrr;
    p.albedo[c] = bestAlb;
    p.specular[c] = bestS;
  }
}

double sample_coord(int x, int dstSize, int srcSize) {
  const double u = (x + 0.5) * srcSize / dstSize - 0.5;
  return std::clamp(u, 0.0, static_cast<double>(srcSize - 1));
}

template <int N>
Image<N> upsample_impl(const Image<N>& img, int width, int height) {
  if (img.empty()) throw std::invalid_argument("cannot upsample an empty image");
  if (width <= 0 || height <= 0) throw std::invalid_argument("upsample target must be positive");
  Image<N> out(width, height);
  out.set_encoding(img.encoding(), img.gamma());
  for (int y = 0; y < height; ++y) {
    const double v = sample_coord(y, height, img.height());
    const int y0 = static_cast<int>(v);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = v - y0;
    for (int x = 0; x < width; ++x) {
      const double u = sample_coord(x, width, img.width());
      const int x0 = static_cast<int>(u);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = u - x0;
      for (int c = 0; c < N; ++c) {
        const double top = (1.0 - fx) * img(x0, y0, c) + fx * img(x1, y0, c);
        const double bottom = (1.0 - fx) * img(x0, y1, c) + fx * img(x1, y1, c);
        out(x, y, c) = static_cast<float>((1.0 - fy) * top + fy * bottom);
      }
    }
  }
  return out;
}

}  // namespace

void RefineConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(blendWeight > 0.0 && blendWeight <= 1.0)) throw std::invalid_argument("blend weight must be in (0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

PixelLayers solve_layer(const Rgb& color, const PixelLayers& layers, LayerKind which, double epsilon) {
  PixelLayers out = layers;
  const Rgb unoccluded = color / std::max(layers.occlusion, epsilon);
  switch (which) {
    case LayerKind::Specular:
      out.specular = unoccluded - layers.irradiance * layers.albedo;
      break;
    case LayerKind::Irradiance:
      out.irradiance = guarded_div(unoccluded - layers.specular, layers.albedo, epsilon);
      break;
    case LayerKind::Albedo:
      out.albedo = guarded_div(unoccluded - layers.specular, layers.irradiance, epsilon);
      break;
    case LayerKind::Occlusion: {
      const Rgb v = layers.irradiance * layers.albedo + layers.specular;
      const double vv = dot(v, v);
      if (vv > 0.0) out.occlusion = dot(color, v) / vv;
      break;
    }
  }
  return out;
}

Rgb project_chroma(const Rgb& candidate, const Rgb& reference) {
  const double ref = luminance(reference);
  if (!(ref > 0.0)) return candidate;
  return reference * (luminance(candidate) / ref);
}

PixelLayers refine_pixel(const Rgb& color, const PixelLayers& init, const RefineConfig& config) {
  if (recomposes(color, init)) return init;
  const double w = config.blendWeight;
  const double eps = config.epsilon;
  PixelLayers p = init;
  for (int it = 0; it < config.iterations; ++it) {
    for (LayerKind kind : kSolveOrder) {
      const PixelLayers solved = solve_layer(color, p, kind, eps);
      switch (kind) {
        case LayerKind::Specular:
          p.specular = clamp_non_negative(blend(p.specular, solved.specular, w));
          break;
        case LayerKind::Irradiance:
          p.irradiance =
              clamp_non_negative(blend(p.irradiance, project_chroma(solved.irradiance, init.irradiance), w));
          break;
        case LayerKind::Albedo:
          p.albedo = clamp_cube(blend(p.albedo, solved.albedo, w));
          break;
        case LayerKind::Occlusion:
          p.occlusion = std::clamp(p.occlusion + w * (solved.occlusion - p.occlusion), 0.0, 1.0);
          break;
      }
    }
  }
  if (config.exactFinalize) finalize_specular(color, p, eps);
  return p;
}

ImageRGB bilinear_upsample(const ImageRGB& img, int width, int height) { return upsample_impl(img, width, height); }
ImageScalar bilinear_upsample(const ImageScalar& img, int width, int height) {
  return upsample_impl(img, width, height);
}

LayerSet bilinear_upsample(const LayerSet& layers, int width, int height) {
  layers.require_consistent();
  return {bilinear_upsample(layers.occlusion, width, height), bilinear_upsample(layers.irradiance, width, height),
          bilinear_upsample(layers.albedo, width, height), bilinear_upsample(layers.specular, width, height)};
}

LayerSet upsample_layers(const LayerSet& low, const ImageRGB& hd, const RefineConfig& config) {
  config.validate();
  low.require_consistent();
  if (hd.empty()) throw std::invalid_argument("high-resolution input is empty");
  if (hd.width() < low.width() || hd.height() < low.height()) {
    throw DimensionMismatch("high-resolution input " + std::to_string(hd.width()) + "x" +
                            std::to_string(hd.height()) + " is smaller than the layers " +
                            std::to_string(low.width()) + "x" + std::to_string(low.height()));
  }
  LayerSet out = bilinear_upsample(low, hd.width(), hd.height());
  const int w = hd.width();
  parallel_for(static_cast<std::size_t>(hd.height()), config.threads, [&](std::size_t row) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = row * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      const PixelLayers init{out.occlusion.values()[i], out.irradiance.rgb_at(i), out.albedo.rgb_at(i),
                             out.specular.rgb_at(i)};
      const PixelLayers p = refine_pixel(hd.rgb_at(i), init, config);
      out.occlusion.values()[i] = static_cast<float>(p.occlusion);
      out.irradiance.set_rgb_at(i, p.irradiance);
      out.albedo.set_rgb_at(i, p.albedo);
      out.specular.set_rgb_at(i, p.specular);
    }
  });
  return out;
}

}  // namespace lightlayers
