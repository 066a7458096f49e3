#include "lightlayers/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "lightlayers/color.hpp"

namespace lightlayers {

namespace {

template <int C>
std::string encode_pfm_impl(const Image<C>& img) {
  if (img.empty()) throw std::invalid_argument("write_pfm: empty image");
  if (!img.all_finite()) throw Error("write_pfm: image contains non-finite values");

  std::string out = (C == 3 ? "PF\n" : "Pf\n") + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n-1.0\n";
  const std::size_t header = out.size();
  const std::size_t rowFloats = static_cast<std::size_t>(img.width()) * C;
  out.resize(header + rowFloats * img.height() * sizeof(float));

  const auto values = img.values();
  char* dst = out.data() + header;
  for (int y = img.height() - 1; y >= 0; --y) {
    const float* row = values.data() + static_cast<std::size_t>(y) * rowFloats;
    for (std::size_t i = 0; i < rowFloats; ++i) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(row[i]);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      std::memcpy(dst, &bits, sizeof bits);
      dst += sizeof bits;
    }
  }
  return out;
}

// Pulls the next whitespace-delimited header token. PFM headers allow a
// single whitespace character after the scale token before the payload.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

int parse_dimension(std::string_view token) {
  if (token.empty() || token.size() > 9) throw FormatError("PFM: malformed dimension");
  int v = 0;
  for (char ch : token) {
    if (ch < '0' || ch > '9') throw FormatError("PFM: malformed dimension");
    v = v * 10 + (ch - '0');
  }
  if (v <= 0) throw FormatError("PFM: dimensions must be positive");
  return v;
}

template <int C>
Image<C> decode_payload(std::string_view payload, int width, int height, bool littleEndian) {
  Image<C> img(width, height);
  const std::size_t rowFloats = static_cast<std::size_t>(width) * C;
  auto values = img.values();
  const char* src = payload.data();
  const bool swap = littleEndian != (std::endian::native == std::endian::little);
  for (int y = height - 1; y >= 0; --y) {
    float* row = values.data() + static_cast<std::size_t>(y) * rowFloats;
    for (std::size_t i = 0; i < rowFloats; ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, src, sizeof bits);
      src += sizeof bits;
      if (swap) bits = __builtin_bswap32(bits);
      row[i] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(ss).str();
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;


}  // namespace

std::string encode_pfm(const ImageRGB& img) { return encode_pfm_impl(img); }
std::string encode_pfm(const ImageScalar& img) { return encode_pfm_impl(img); }

std::variant<ImageRGB, ImageScalar> decode_pfm(std::string_view bytes) {
  std::size_t pos = 0;
  const std::string_view magic = next_token(bytes, pos);
  int channels = 0;
  if (magic == "PF") {
    channels = 3;
  } else if (magic == "Pf") {
    channels = 1;
  } else {
    throw FormatError("PFM: bad magic");
  }
  const int width = parse_dimension(next_token(bytes, pos));
  const int height = parse_dimension(next_token(bytes, pos));
  const std::string scaleToken(next_token(bytes, pos));
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scaleToken, &used);
    if (used != scaleToken.size()) throw FormatError("PFM: malformed scale");
  } catch (const std::logic_error&) {
    throw FormatError("PFM: malformed scale");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("PFM: scale must be non-zero");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("PFM: truncated header");
  }
  ++pos;

  const std::size_t expected = static_cast<std::size_t>(width) * height * channels * sizeof(float);
  if (bytes.size() - pos < expected) throw FormatError("PFM: truncated payload");
  const std::string_view payload = bytes.substr(pos, expected);
  if (channels == 3) return decode_payload<3>(payload, width, height, scale < 0);
  return decode_payload<1>(payload, width, height, scale < 0);
}

void write_pfm(const std::filesystem::path& path, const ImageRGB& img) { spit(path, encode_pfm(img)); }
void write_pfm(const std::filesystem::path& path, const ImageScalar& img) { spit(path, encode_pfm(img)); }

std::variant<ImageRGB, ImageScalar> read_pfm(const std::filesystem::path& path) {
  try {
    return decode_pfm(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

ImageRGB read_pfm_rgb(const std::filesystem::path& path) {
  auto any = read_pfm(path);
  if (auto* rgb = std::get_if<ImageRGB>(&any)) return std::move(*rgb);
  throw FormatError(path.string() + ": expected an RGB (PF) file");
}

ImageScalar read_pfm_scalar(const std::filesystem::path& path) {
  auto any = read_pfm(path);
  if (auto* grey = std::get_if<ImageScalar>(&any)) return std::move(*grey);
  throw FormatError(path.string() + ": expected a greyscale (Pf) file");
}

namespace {

// libpng reports errors by longjmp; the raw helpers below keep only
// trivially destructible locals in the frames that call setjmp.
struct PngStatus {
  char message[256] = {};
};

void png_on_error(png_structp png, png_const_charp msg) {
  auto* status = static_cast<PngStatus*>(png_get_error_ptr(png));
  std::snprintf(status->message, sizeof status->message, "%s", msg);
  png_longjmp(png, 1);
}
void png_on_warning(png_structp, png_const_charp) {}

bool png_write_raw(std::FILE* file, const png_byte* pixels, png_uint_32 width, png_uint_32 height, double gamma,
                   PngStatus& status) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &status, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  if (!info) png_error(png, "out of memory");
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_gAMA(png, info, 1.0 / gamma);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * 3;
  for (png_uint_32 y = 0; y < height; ++y) png_write_row(png, pixels + stride * y);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

struct PngDecoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  bool wide = false;
  std::vector<png_byte> bytes;
  std::vector<png_bytep> rows;
};

bool png_read_raw(std::FILE* file, PngDecoded& out, PngStatus& status) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &status, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (!info) png_error(png, "out of memory");
  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  out.width = png_get_image_width(png, info);
  out.height = png_get_image_height(png, info);
  const int colorType = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (colorType == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (colorType == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (colorType == PNG_COLOR_TYPE_GRAY || colorType == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if ((colorType & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t rowBytes = png_get_rowbytes(png, info);
  out.wide = png_get_bit_depth(png, info) == 16;
  out.bytes.resize(rowBytes * out.height);
  out.rows.resize(out.height);
  for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.bytes.data() + rowBytes * y;
  png_read_image(png, out.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

}  // namespace

void write_png(const std::filesystem::path& path, const ImageRGB& encoded) {
  if (encoded.empty()) throw std::invalid_argument("write_png: empty image");
  const auto values = encoded.values();
  std::vector<png_byte> bytes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = values[i];
    if (!(v >= 0.0f && v <= 1.0f)) throw Error("write_png: values must lie in [0,1]");
    bytes[i] = static_cast<png_byte>(std::lround(static_cast<double>(v) * 255.0));
  }

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  const double gamma = encoded.encoding() == Encoding::Gamma ? encoded.gamma() : kDefaultGamma;
  PngStatus status;
  if (!png_write_raw(file.get(), bytes.data(), static_cast<png_uint_32>(encoded.width()),
                     static_cast<png_uint_32>(encoded.height()), gamma, status)) {
    throw IoError(path.string() + ": PNG write failed: " + status.message);
  }
  if (std::fflush(file.get()) != 0) throw IoError("failed writing " + path.string());
}

ImageRGB read_png(const std::filesystem::path& path, double gamma) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  PngDecoded decoded;
  PngStatus status;
  if (!png_read_raw(file.get(), decoded, status)) throw FormatError(path.string() + ": " + status.message);

  ImageRGB img(static_cast<int>(decoded.width), static_cast<int>(decoded.height));
  img.set_encoding(Encoding::Gamma, gamma);
  auto values = img.values();
  if (decoded.wide) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint16_t v;
      std::memcpy(&v, decoded.bytes.data() + 2 * i, 2);
      values[i] = static_cast<float>(v / 65535.0);
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(decoded.bytes[i] / 255.0);
  }
  return img;
}

ImageRGB read_linear_rgb(const std::filesystem::path& path, double gamma) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return gamma_decode(read_png(path, gamma), gamma);
  if (ext == ".pfm") {
    auto any = read_pfm(path);
    if (auto* rgb = std::get_if<ImageRGB>(&any)) return std::move(*rgb);
    const auto& grey = std::get<ImageScalar>(any);
    ImageRGB out(grey.width(), grey.height());
    for (std::size_t i = 0; i < grey.pixel_count(); ++i) out.set_rgb_at(i, Rgb::grey(grey.values()[i]));
    return out;
  }
  throw FormatError(path.string() + ": unsupported image format (expected .png or .pfm)");
}

}  // namespace lightlayers
