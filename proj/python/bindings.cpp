#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

#include "lightlayers/basis.hpp"
#include "lightlayers/color.hpp"
#include "lightlayers/error.hpp"
#include "lightlayers/imageio.hpp"
#include "lightlayers/layer_io.hpp"
#include "lightlayers/metrics.hpp"
#include "lightlayers/model.hpp"
#include "lightlayers/refine.hpp"

namespace py = pybind11;
using namespace lightlayers;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// Images cross the boundary as float32 arrays: (H, W) for scalar layers and
// (H, W, 3) for RGB.
ImageRGB to_rgb(const FloatArray& a, const char* what) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw py::value_error(std::string(what) + ": expected an (H, W, 3) array");
  }
  ImageRGB img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.values().begin());
  return img;
}

ImageScalar to_scalar(const FloatArray& a, const char* what) {
  if (a.ndim() == 3 && a.shape(2) == 1) {
    ImageScalar img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), img.values().begin());
    return img;
  }
  if (a.ndim() != 2) throw py::value_error(std::string(what) + ": expected an (H, W) array");
  ImageScalar img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), img.values().begin());
  return img;
}

py::array_t<float> to_numpy(const ImageRGB& img) {
  py::array_t<float> out({img.height(), img.width(), 3});
  std::copy(img.values().begin(), img.values().end(), out.mutable_data());
  return out;
}

py::array_t<float> to_numpy(const ImageScalar& img) {
  py::array_t<float> out({img.height(), img.width()});
  std::copy(img.values().begin(), img.values().end(), out.mutable_data());
  return out;
}

LayerSet layers_from_dict(const py::dict& d) {
  LayerSet l{to_scalar(d["occlusion"].cast<FloatArray>(), "occlusion"),
             to_rgb(d["irradiance"].cast<FloatArray>(), "irradiance"),
             to_rgb(d["albedo"].cast<FloatArray>(), "albedo"), to_rgb(d["specular"].cast<FloatArray>(), "specular")};
  l.require_consistent();
  return l;
}

py::dict layers_to_dict(const LayerSet& l) {
  py::dict d;
  d["occlusion"] = to_numpy(l.occlusion);
  d["irradiance"] = to_numpy(l.irradiance);
  d["albedo"] = to_numpy(l.albedo);
  d["specular"] = to_numpy(l.specular);
  return d;
}

// Directional dicts hold "diffuse" and "specular" as (6, H, W, 3) stacks.
DirectionalLayerSet directional_from_dict(const py::dict& d) {
  DirectionalLayerSet l;
  l.occlusion = to_scalar(d["occlusion"].cast<FloatArray>(), "occlusion");
  l.albedo = to_rgb(d["albedo"].cast<FloatArray>(), "albedo");
  for (const char* key : {"diffuse", "specular"}) {
    const auto stack = d[key].cast<FloatArray>();
    if (stack.ndim() != 4 || stack.shape(0) != kBasisCount || stack.shape(3) != 3) {
      throw py::value_error(std::string(key) + ": expected a (6, H, W, 3) array");
    }
    const auto w = static_cast<int>(stack.shape(2));
    const auto h = static_cast<int>(stack.shape(1));
    const std::size_t plane = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
    auto& target = std::string(key) == "diffuse" ? l.diffuse : l.specular;
    for (int i = 0; i < kBasisCount; ++i) {
      target[i] = ImageRGB(w, h);
      std::copy(stack.data() + i * plane, stack.data() + (i + 1) * plane, target[i].values().begin());
    }
  }
  l.require_consistent();
  return l;
}

py::array_t<float> stack_to_numpy(const std::array<ImageRGB, kBasisCount>& parts) {
  const ImageRGB& first = parts.front();
  py::array_t<float> out({kBasisCount, first.height(), first.width(), 3});
  float* dst = out.mutable_data();
  for (const ImageRGB& p : parts) dst = std::copy(p.values().begin(), p.values().end(), dst);
  return out;
}

py::dict directional_to_dict(const DirectionalLayerSet& l) {
  py::dict d;
  d["occlusion"] = to_numpy(l.occlusion);
  d["albedo"] = to_numpy(l.albedo);
  d["diffuse"] = stack_to_numpy(l.diffuse);
  d["specular"] = stack_to_numpy(l.specular);
  return d;
}

NrmseNorm parse_norm(const std::string& name) {
  if (name == "euclidean") return NrmseNorm::Euclidean;
  if (name == "minmax") return NrmseNorm::MinMax;
  throw py::value_error("norm must be 'euclidean' or 'minmax'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Light transport layer I/O, composition, metrics and refinement";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());

  m.attr("BASIS_COUNT") = kBasisCount;
  m.attr("DEFAULT_EPSILON") = kDefaultEpsilon;
  m.attr("DEFAULT_GAMMA") = kDefaultGamma;

  m.def(
      "read_pfm",
      [](const std::filesystem::path& path) -> py::array_t<float> {
        auto img = read_pfm(path);
        if (auto* rgb = std::get_if<ImageRGB>(&img)) return to_numpy(*rgb);
        return to_numpy(std::get<ImageScalar>(img));
      },
      py::arg("path"), "Reads a PFM as (H, W) or (H, W, 3) float32, row 0 at the top.");
  m.def(
      "write_pfm",
      [](const std::filesystem::path& path, const FloatArray& a) {
        if (a.ndim() == 2) {
          write_pfm(path, to_scalar(a, "write_pfm"));
        } else {
          write_pfm(path, to_rgb(a, "write_pfm"));
        }
      },
      py::arg("path"), py::arg("image"));
  m.def(
      "read_png", [](const std::filesystem::path& path) { return to_numpy(read_png(path)); }, py::arg("path"),
      "Reads a PNG as gamma-encoded RGB in [0, 1].");
  m.def(
      "write_png",
      [](const std::filesystem::path& path, const FloatArray& encoded) {
        ImageRGB img = to_rgb(encoded, "write_png");
        img.set_encoding(Encoding::Gamma, kDefaultGamma);
        write_png(path, img);
      },
      py::arg("path"), py::arg("encoded"));
  m.def(
      "read_linear",
      [](const std::filesystem::path& path, double gamma) { return to_numpy(read_linear_rgb(path, gamma)); },
      py::arg("path"), py::arg("gamma") = kDefaultGamma, "PNG is gamma-decoded; PFM is taken as linear.");
  m.def(
      "gamma_encode",
      [](const FloatArray& a, double gamma) { return to_numpy(gamma_encode(to_rgb(a, "gamma_encode"), gamma)); },
      py::arg("linear"), py::arg("gamma") = kDefaultGamma);
  m.def(
      "gamma_decode",
      [](const FloatArray& a, double gamma) {
        ImageRGB img = to_rgb(a, "gamma_decode");
        img.set_encoding(Encoding::Gamma, gamma);
        return to_numpy(gamma_decode(img, gamma));
      },
      py::arg("encoded"), py::arg("gamma") = kDefaultGamma);

  m.def(
      "read_layers", [](const std::filesystem::path& stem) { return layers_to_dict(read_layers(stem)); },
      py::arg("stem"));
  m.def(
      "write_layers",
      [](const std::filesystem::path& stem, const py::dict& layers) { write_layers(stem, layers_from_dict(layers)); },
      py::arg("stem"), py::arg("layers"));
  m.def(
      "read_directional_layers",
      [](const std::filesystem::path& stem) { return directional_to_dict(read_directional_layers(stem)); },
      py::arg("stem"));
  m.def(
      "write_directional_layers",
      [](const std::filesystem::path& stem, const py::dict& layers) {
        write_directional_layers(stem, directional_from_dict(layers));
      },
      py::arg("stem"), py::arg("layers"));

  m.def(
      "compose", [](const py::dict& layers) { return to_numpy(compose(layers_from_dict(layers))); },
      py::arg("layers"), "C = O (rho I + S)");
  m.def(
      "compose_directional",
      [](const py::dict& layers) { return to_numpy(compose_directional(directional_from_dict(layers))); },
      py::arg("layers"), "C = O (rho sum D_i + sum S_i)");
  m.def(
      "recombination_residuals",
      [](const py::dict& layers, const FloatArray& image, double epsilon, std::optional<py::dict> reference) {
        const LayerSet l = layers_from_dict(layers);
        std::optional<LayerSet> ref;
        if (reference) ref = layers_from_dict(*reference);
        ResidualOptions opts;
        opts.epsilon = epsilon;
        opts.reference = ref ? &*ref : nullptr;
        const Residuals r = recombination_residuals(l, to_rgb(image, "image"), opts);
        return py::make_tuple(to_numpy(r.composed), to_numpy(r.unoccluded), to_numpy(r.diffuse));
      },
      py::arg("layers"), py::arg("image"), py::arg("epsilon") = kDefaultEpsilon, py::arg("reference") = py::none(),
      "Signed (r1, r2, r3). `reference` supplies the O divisor and the S of r3.");

  m.def(
      "dssim", [](const FloatArray& a, const FloatArray& b) { return dssim(to_rgb(a, "a"), to_rgb(b, "b")); },
      py::arg("a"), py::arg("b"));
  m.def(
      "nrmse",
      [](const FloatArray& pred, const FloatArray& ref, const std::string& norm) {
        return nrmse(to_rgb(pred, "pred"), to_rgb(ref, "ref"), parse_norm(norm));
      },
      py::arg("pred"), py::arg("ref"), py::arg("norm") = "euclidean");
  m.def(
      "evaluate",
      [](const py::dict& pred, const py::dict& gt, std::optional<FloatArray> image, const std::string& norm) {
        const LayerSet p = layers_from_dict(pred);
        const LayerSet g = layers_from_dict(gt);
        EvalOptions opts;
        opts.norm = parse_norm(norm);
        const EvalReport report = evaluate_decomposition(p, g, image ? to_rgb(*image, "image") : compose(g), opts);
        py::dict out;
        for (const auto& [key, value] : report.fields()) out[py::str(key)] = value;
        return out;
      },
      py::arg("pred"), py::arg("gt"), py::arg("image") = py::none(), py::arg("norm") = "euclidean",
      "Report fields keyed as in the CLI report; image defaults to compose(gt).");

  m.def(
      "upsample_layers",
      [](const py::dict& low, const FloatArray& hd, int iterations, double blendWeight, double epsilon,
         bool exactFinalize, int threads) {
        RefineConfig cfg;
        cfg.iterations = iterations;
        cfg.blendWeight = blendWeight;
        cfg.epsilon = epsilon;
        cfg.exactFinalize = exactFinalize;
        cfg.threads = threads;
        const LayerSet l = layers_from_dict(low);
        const ImageRGB image = to_rgb(hd, "hd");
        LayerSet out;
        {
          py::gil_scoped_release release;
          out = upsample_layers(l, image, cfg);
        }
        return layers_to_dict(out);
      },
      py::arg("layers"), py::arg("hd"), py::arg("iterations") = 100, py::arg("blend_weight") = 0.001,
      py::arg("epsilon") = kDefaultEpsilon, py::arg("exact_finalize") = true, py::arg("threads") = 1);

  m.def(
      "soft_cube_weights",
      [](double x, double y, double z, double sharpness) {
        return SoftCubeBasis(sharpness).weights(Direction::normalized({x, y, z}).vec());
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("sharpness") = kDefaultSharpness,
      "Weights in basis order (+x, -x, +y, -y, +z, -z).");
}
