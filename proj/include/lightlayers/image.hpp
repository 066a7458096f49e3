#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lightlayers/error.hpp"
#include "lightlayers/vec.hpp"

namespace lightlayers {

enum class Encoding { Linear, Gamma };

/// Row-major float image with `Channels` interleaved channels. Row 0 is the
/// top of the image. Values are physically linear unless the encoding says
/// otherwise.
template <int Channels>
class Image {
  static_assert(Channels == 1 || Channels == 3);

 public:
  static constexpr int kChannels = Channels;

  Image() = default;
  Image(int width, int height, float fill = 0.0f)
      : width_(width), height_(height), data_(checked_count(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }
  bool empty() const { return data_.empty(); }

  float& operator()(int x, int y, int c = 0) { return data_[index(x, y) + c]; }
  float operator()(int x, int y, int c = 0) const { return data_[index(x, y) + c]; }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  Rgb rgb(int x, int y) const
    requires(Channels == 3)
  {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set_rgb(int x, int y, const Rgb& c)
    requires(Channels == 3)
  {
    const std::size_t i = index(x, y);
    data_[i] = static_cast<float>(c.r);
    data_[i + 1] = static_cast<float>(c.g);
    data_[i + 2] = static_cast<float>(c.b);
  }
  Rgb rgb_at(std::size_t pixel) const
    requires(Channels == 3)
  {
    const std::size_t i = pixel * 3;
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set_rgb_at(std::size_t pixel, const Rgb& c)
    requires(Channels == 3)
  {
    const std::size_t i = pixel * 3;
    data_[i] = static_cast<float>(c.r);
    data_[i + 1] = static_cast<float>(c.g);
    data_[i + 2] = static_cast<float>(c.b);
  }

  Encoding encoding() const { return encoding_; }
  double gamma() const { return gamma_; }
  void set_encoding(Encoding e, double gamma = 1.0) {
    encoding_ = e;
    gamma_ = e == Encoding::Linear ? 1.0 : gamma;
  }

  template <int M>
  bool same_size(const Image<M>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static std::size_t checked_count(int width, int height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * Channels;
  }
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * Channels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
  Encoding encoding_ = Encoding::Linear;
  double gamma_ = 1.0;
};

using ImageRGB = Image<3>;
using ImageScalar = Image<1>;

template <int A, int B>
void require_same_size(const Image<A>& a, const Image<B>& b, const char* what) {
  if (!a.same_size(b)) {
    throw DimensionMismatch(std::string(what) + ": image dimensions differ (" + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                            std::to_string(b.height()) + ")");
  }
}

}  // namespace lightlayers
