#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "lightlayers/image.hpp"

namespace lightlayers {

// PFM: "PF" (RGB) or "Pf" (grey) header, little-endian scale line "-1.0",
// rows stored bottom-up. Readers also accept big-endian files.
std::string encode_pfm(const ImageRGB& img);
std::string encode_pfm(const ImageScalar& img);
std::variant<ImageRGB, ImageScalar> decode_pfm(std::string_view bytes);

void write_pfm(const std::filesystem::path& path, const ImageRGB& img);
void write_pfm(const std::filesystem::path& path, const ImageScalar& img);
std::variant<ImageRGB, ImageScalar> read_pfm(const std::filesystem::path& path);
ImageRGB read_pfm_rgb(const std::filesystem::path& path);
ImageScalar read_pfm_scalar(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. The image must already be gamma encoded with
/// values in [0,1]; each value is quantized to round(v * 255). The file
/// carries a gAMA chunk matching the image's gamma.
void write_png(const std::filesystem::path& path, const ImageRGB& encoded);

/// Reads an 8-bit or 16-bit PNG as gamma-encoded RGB in [0,1]. Grey and
/// alpha channels are expanded/stripped. The returned gamma is 2.0 unless
/// `gamma` overrides it.
ImageRGB read_png(const std::filesystem::path& path, double gamma = 2.0);

/// Loads any supported LDR/HDR file as linear RGB: PNG is gamma-decoded,
/// PFM is taken as linear (grey PFMs are broadcast to RGB).
ImageRGB read_linear_rgb(const std::filesystem::path& path, double gamma = 2.0);

}  // namespace lightlayers
