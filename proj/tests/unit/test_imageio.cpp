#include <cstring>
#include <fstream>

#include "lightlayers/color.hpp"
#include "lightlayers/imageio.hpp"
#include "lightlayers/layer_io.hpp"
#include "test_util.hpp"

using namespace lightlayers;
using testutil::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Pfm, RoundTripRgbBitExact) {
  Rng rng(1);
  ImageRGB img = testutil::random_rgb(7, 5, rng, -3.0, 40.0);
  img(0, 0, 0) = 1e-30f;
  img(6, 4, 2) = -0.0f;
  const auto back = std::get<ImageRGB>(decode_pfm(encode_pfm(img)));
  ASSERT_EQ(back.width(), 7);
  ASSERT_EQ(back.height(), 5);
  EXPECT_EQ(std::memcmp(back.values().data(), img.values().data(), img.values().size_bytes()), 0);
}

TEST(Pfm, RoundTripScalarThroughFile) {
  TempDir dir;
  Rng rng(2);
  const ImageScalar img = testutil::random_scalar(4, 9, rng);
  write_pfm(dir / "a.pfm", img);
  EXPECT_EQ(read_pfm_scalar(dir / "a.pfm"), img);
  EXPECT_THROW(read_pfm_rgb(dir / "a.pfm"), FormatError);
}

TEST(Pfm, HeaderAndBottomUpRows) {
  ImageScalar img(2, 2);
  img(0, 0) = 1.0f;  // top row
  img(1, 0) = 2.0f;
  img(0, 1) = 3.0f;  // bottom row
  img(1, 1) = 4.0f;
  const std::string bytes = encode_pfm(img);
  const std::string header = "Pf\n2 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  float payload[4];
  std::memcpy(payload, bytes.data() + header.size(), sizeof payload);
  EXPECT_EQ(payload[0], 3.0f);
  EXPECT_EQ(payload[1], 4.0f);
  EXPECT_EQ(payload[2], 1.0f);
  EXPECT_EQ(payload[3], 2.0f);
}

TEST(Pfm, ReadsBigEndian) {
  std::string bytes = "PF\n1 1\n1.0\n";
  const float vals[3] = {0.5f, 2.0f, -7.25f};
  for (float v : vals) {
    unsigned char b[4];
    std::memcpy(b, &v, 4);
    for (int i = 3; i >= 0; --i) bytes.push_back(static_cast<char>(b[i]));
  }
  const auto img = std::get<ImageRGB>(decode_pfm(bytes));
  EXPECT_EQ(img.rgb(0, 0), (Rgb{0.5, 2.0, -7.25}));
}

TEST(Pfm, RejectsMalformedInput) {
  EXPECT_THROW(decode_pfm("P6\n1 1\n255\n"), FormatError);
  EXPECT_THROW(decode_pfm("PF\n2 2\n-1.0\n\x01\x02"), FormatError);
  EXPECT_THROW(decode_pfm("PF\n0 2\n-1.0\n"), FormatError);
  EXPECT_THROW(decode_pfm(""), FormatError);
  EXPECT_THROW(read_pfm("/nonexistent/dir/x.pfm"), IoError);
}

TEST(Pfm, RejectsNonFiniteOnWrite) {
  TempDir dir;
  ImageRGB img(2, 2);
  img(1, 1, 1) = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(write_pfm(dir / "nan.pfm", img), Error);
  img(1, 1, 1) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(write_pfm(dir / "inf.pfm", img), Error);
}

TEST(Png, RoundTripQuantizes) {
  TempDir dir;
  Rng rng(3);
  ImageRGB img = testutil::random_rgb(13, 6, rng);
  img.set_encoding(Encoding::Gamma, 2.0);
  write_png(dir / "a.png", img);
  const ImageRGB back = read_png(dir / "a.png");
  EXPECT_EQ(back.encoding(), Encoding::Gamma);
  EXPECT_EQ(back.gamma(), 2.0);
  for (std::size_t i = 0; i < img.values().size(); ++i) {
    // Round-to-nearest 8-bit quantization.
    EXPECT_EQ(back.values()[i], std::round(img.values()[i] * 255.0f) / 255.0f);
  }
  EXPECT_EQ(back, quantize8(img));
}

TEST(Png, CarriesGammaChunk) {
  TempDir dir;
  ImageRGB img(1, 1, 0.5f);
  img.set_encoding(Encoding::Gamma, 2.0);
  write_png(dir / "g.png", img);
  const std::string bytes = slurp(dir / "g.png");
  const auto pos = bytes.find("gAMA");
  ASSERT_NE(pos, std::string::npos);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + 4);
  const unsigned value = (p[0] << 24) | (p[1] << 16) | (p[2] << 8) | p[3];
  EXPECT_EQ(value, 50000u);  // 1/2.0 in units of 1e-5
}

TEST(Png, RejectsOutOfRangeAndBadFiles) {
  TempDir dir;
  ImageRGB img(2, 2, 1.5f);
  EXPECT_THROW(write_png(dir / "x.png", img), Error);
  std::ofstream(dir / "bad.png") << "not a png";
  EXPECT_THROW(read_png(dir / "bad.png"), FormatError);
  EXPECT_THROW(read_png(dir / "missing.png"), IoError);
}

TEST(LinearRead, DecodesPngAndBroadcastsGreyPfm) {
  TempDir dir;
  ImageRGB enc(1, 1, 0.5f);
  enc.set_encoding(Encoding::Gamma, 2.0);
  write_png(dir / "a.png", enc);
  const ImageRGB lin = read_linear_rgb(dir / "a.png");
  EXPECT_EQ(lin.encoding(), Encoding::Linear);
  const double q = std::round(0.5 * 255.0) / 255.0;
  EXPECT_NEAR(lin(0, 0, 0), q * q, 1e-7);

  ImageScalar grey(2, 1);
  grey(0, 0) = 0.25f;
  grey(1, 0) = 3.0f;
  write_pfm(dir / "g.pfm", grey);
  const ImageRGB rgb = read_linear_rgb(dir / "g.pfm");
  EXPECT_EQ(rgb.rgb(1, 0), Rgb::grey(3.0));
}

TEST(LayerIo, StemNamingAndRoundTrip) {
  TempDir dir;
  Rng rng(4);
  const LayerSet layers = testutil::random_layers(5, 3, rng);
  const auto stem = dir / "rec";
  EXPECT_FALSE(layers_exist(stem));
  write_layers(stem, layers);
  for (const char* s : {"rec.occ.pfm", "rec.irr.pfm", "rec.alb.pfm", "rec.spec.pfm"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / s)) << s;
  }
  EXPECT_TRUE(layers_exist(stem));
  const LayerSet back = read_layers(stem);
  EXPECT_EQ(back.occlusion, layers.occlusion);
  EXPECT_EQ(back.irradiance, layers.irradiance);
  EXPECT_EQ(back.albedo, layers.albedo);
  EXPECT_EQ(back.specular, layers.specular);
  EXPECT_EQ(composed_path(stem), dir / "rec.composed.png");
}

TEST(LayerIo, DirectionalRoundTrip) {
  TempDir dir;
  Rng rng(5);
  DirectionalLayerSet d;
  d.occlusion = testutil::random_scalar(3, 3, rng);
  d.albedo = testutil::random_rgb(3, 3, rng);
  for (int i = 0; i < kBasisCount; ++i) {
    d.diffuse[i] = testutil::random_rgb(3, 3, rng);
    d.specular[i] = testutil::random_rgb(3, 3, rng);
  }
  write_directional_layers(dir / "r", d);
  EXPECT_TRUE(std::filesystem::exists(dir / "r.d5.pfm"));
  EXPECT_TRUE(std::filesystem::exists(dir / "r.s0.pfm"));
  const auto back = read_directional_layers(dir / "r");
  EXPECT_EQ(back.diffuse[3], d.diffuse[3]);
  EXPECT_EQ(back.specular[5], d.specular[5]);
  EXPECT_EQ(compose_directional(back), compose_directional(d));
}

TEST(LayerIo, MismatchedLayersRejected) {
  TempDir dir;
  Rng rng(6);
  LayerSet layers = testutil::random_layers(4, 4, rng);
  layers.albedo = testutil::random_rgb(4, 5, rng);
  EXPECT_THROW(write_layers(dir / "x", layers), DimensionMismatch);
}
