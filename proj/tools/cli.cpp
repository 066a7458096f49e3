#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lightlayers/color.hpp"
#include "lightlayers/datagen.hpp"
#include "lightlayers/imageio.hpp"
#include "lightlayers/layer_io.hpp"
#include "lightlayers/metrics.hpp"
#include "lightlayers/parallel.hpp"
#include "lightlayers/prefilter.hpp"
#include "lightlayers/refine.hpp"

namespace lightlayers::cli {

namespace fs = std::filesystem;

namespace {

// Raised for bad flag values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool verbose = false;
};

struct GenDataArgs {
  std::string config;
  int count = 0;
  int resolution = 0;
  int envWidth = 0;
  bool directional = false;
  int occlusionSamples = 0;
  double occlusionRangeFactor = 0.0;
  double sharpness = 0.0;
  std::vector<std::string> presets;
  std::string out;
};

struct ComposeArgs {
  std::string layers;
  std::string out;
  bool directional = false;
};

struct ComposeDirArgs {
  std::string dir;
  std::string out;
  bool directional = false;
};

struct SplitEnvArgs {
  std::string env;
  std::string out;
  double sharpness = kDefaultSharpness;
};

struct PrefilterArgs {
  std::string env;
  std::string kind;
  double exponent = 0.0;
  int width = kDefaultPrefilterWidth;
  std::string out;
};

struct UpsampleArgs {
  std::string layers;
  std::string hd;
  std::string out;
  int iterations = 100;
  double weight = 0.001;
  double epsilon = kDefaultEpsilon;
  bool noFinalize = false;
};

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string image;
  std::string report;
  std::string norm = "euclidean";
};

struct InspectArgs {
  std::vector<std::string> files;
};

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file: " + path.string());
}

void require_layers(const fs::path& stem) {
  if (!layers_exist(stem)) throw IoError("incomplete layer set at stem " + stem.string());
}

void require_directional_layers(const fs::path& stem) {
  if (!directional_layers_exist(stem)) throw IoError("incomplete directional layer set at stem " + stem.string());
}

bool has_extension(const fs::path& path, const std::string& ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e == ext;
}

void ensure_parent(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
}

// PNG targets get the gamma-encoded, clamped composite; anything else is a
// linear PFM.
void write_composite(const fs::path& path, const ImageRGB& linear) {
  ensure_parent(path);
  if (has_extension(path, ".png")) {
    write_png(path, gamma_encode(linear, kDefaultGamma));
  } else if (has_extension(path, ".pfm")) {
    write_pfm(path, linear);
  } else {
    throw UsageError("output must end in .png or .pfm: " + path.string());
  }
}

ImageRGB compose_stem(const fs::path& stem, bool directional) {
  if (directional) {
    require_directional_layers(stem);
    return compose_directional(read_directional_layers(stem));
  }
  require_layers(stem);
  return compose(read_layers(stem));
}

// Record stems of a dataset directory: the manifest order when present,
// otherwise every <stem>.occ.pfm sorted by name.
std::vector<std::string> dataset_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir.string());
  std::vector<std::string> stems;
  const fs::path manifest = dir / kManifestName;
  if (fs::is_regular_file(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        stems.push_back(nlohmann::json::parse(line).at("stem").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(manifest.string() + ": " + e.what());
      }
    }
    return stems;
  }
  const std::string suffix = ".occ.pfm";
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) stems.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

int cmd_gen_data(const CLI::App& sub, const GenDataArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  DatasetConfig config;
  if (!a.config.empty()) {
    require_file(a.config);
    apply_config_file(config, a.config);
  }
  if (sub.count("--count")) config.count = a.count;
  if (sub.count("--resolution")) config.resolution = a.resolution;
  if (sub.count("--env-width")) config.envWidth = a.envWidth;
  if (sub.count("--directional")) config.directional = a.directional;
  if (sub.count("--occlusion-samples")) config.occlusionSamples = a.occlusionSamples;
  if (sub.count("--occlusion-range-factor")) config.occlusionRangeFactor = a.occlusionRangeFactor;
  if (sub.count("--sharpness")) config.sharpness = a.sharpness;
  if (sub.count("--out")) config.outDir = a.out;
  if (sub.count("--presets")) {
    config.presets.clear();
    for (const std::string& name : a.presets) {
      const auto preset = parse_env_preset(name);
      if (!preset) throw UsageError("unknown preset '" + name + "'");
      config.presets.push_back(*preset);
    }
  }
  if (g.seed) config.seed = *g.seed;
  config.threads = g.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (g.verbose) {
    err << "gen-data: " << config.count << " records at " << config.resolution << "x" << config.resolution
        << " into " << config.outDir.string() << "\n";
  }
  const auto lines = generate_dataset(config);
  out << "wrote " << lines.size() << " records to " << config.outDir.string() << "\n";
  return kExitOk;
}

int cmd_compose(const ComposeArgs& a, std::ostream& out) {
  write_composite(a.out, compose_stem(a.layers, a.directional));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

int cmd_compose_dir(const ComposeDirArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto stems = dataset_stems(a.dir);
  for (const std::string& stem : stems) {
    if (a.directional) {
      require_directional_layers(fs::path(a.dir) / stem);
    } else {
      require_layers(fs::path(a.dir) / stem);
    }
  }
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());
  parallel_for(stems.size(), g.threads, [&](std::size_t i) {
    const ImageRGB c = compose_stem(fs::path(a.dir) / stems[i], a.directional);
    write_png(fs::path(a.out) / (stems[i] + ".png"), gamma_encode(c, kDefaultGamma));
  });
  if (g.verbose) err << "compose-dir: " << stems.size() << " records\n";
  out << "wrote " << stems.size() << " composites to " << a.out << "\n";
  return kExitOk;
}

int cmd_split_env(const SplitEnvArgs& a, std::ostream& out) {
  require_file(a.env);
  const EnvironmentMap env(read_linear_rgb(a.env));
  const auto parts = split_envmap(env, SoftCubeBasis(a.sharpness));
  ensure_parent(a.out);
  for (int i = 0; i < kBasisCount; ++i) write_pfm(layer_path(a.out, "env" + std::to_string(i) + ".pfm"), parts[i].image());
  out << "wrote " << kBasisCount << " maps at stem " << a.out << "\n";
  return kExitOk;
}

int cmd_prefilter(const CLI::App& sub, const PrefilterArgs& a, std::ostream& out) {
  require_file(a.env);
  const EnvironmentMap env(read_linear_rgb(a.env));
  PrefilteredMap result;
  if (a.kind == "irr") {
    result = irradiance_map(env, a.width, a.width / 2);
  } else {
    if (!sub.count("--n")) throw UsageError("--kind gloss requires --n");
    result = glossy_prefilter(env, a.exponent, a.width, a.width / 2);
  }
  ensure_parent(a.out);
  write_pfm(a.out, result.map.image());
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

int cmd_upsample(const UpsampleArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  require_layers(a.layers);
  require_file(a.hd);
  RefineConfig config;
  config.iterations = a.iterations;
  config.blendWeight = a.weight;
  config.epsilon = a.epsilon;
  config.exactFinalize = !a.noFinalize;
  config.threads = g.threads;
  const LayerSet low = read_layers(a.layers);
  const ImageRGB hd = read_linear_rgb(a.hd);
  if (g.verbose) {
    err << "upsample: " << low.width() << "x" << low.height() << " -> " << hd.width() << "x" << hd.height() << "\n";
  }
  const LayerSet refined = upsample_layers(low, hd, config);
  ensure_parent(a.out);
  write_layers(a.out, refined);
  out << "wrote layers at stem " << a.out << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  EvalOptions options;
  options.norm = a.norm == "minmax" ? NrmseNorm::MinMax : NrmseNorm::Euclidean;
  std::ostringstream report;
  if (fs::is_directory(a.pred) && fs::is_directory(a.gt)) {
    if (!a.image.empty()) throw UsageError("--image applies to single-record evaluation only");
    std::vector<EvalJob> jobs;
    for (const std::string& stem : dataset_stems(a.gt)) {
      const fs::path pred = fs::path(a.pred) / stem;
      const fs::path gt = fs::path(a.gt) / stem;
      require_layers(pred);
      require_layers(gt);
      jobs.push_back({pred, gt, {}});
    }
    if (g.verbose) err << "eval: " << jobs.size() << " records\n";
    write_report(report, summarize(evaluate_batch(jobs, options, g.threads)));
  } else {
    require_layers(a.pred);
    require_layers(a.gt);
    if (!a.image.empty()) require_file(a.image);
    write_report(report, evaluate_batch({{a.pred, a.gt, a.image}}, options, 1).front());
  }
  if (a.report.empty()) {
    out << report.str();
  } else {
    ensure_parent(a.report);
    std::ofstream file(a.report, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + a.report + " for writing");
    file << report.str();
    if (!file) throw IoError("failed writing " + a.report);
    out << "wrote " << a.report << "\n";
  }
  return kExitOk;
}

template <int N>
void print_stats(std::ostream& out, const Image<N>& img) {
  out << "  size: " << img.width() << "x" << img.height() << "\n";
  out << "  channels: " << N << "\n";
  out << "  encoding: " << (img.encoding() == Encoding::Linear ? "linear" : "gamma");
  if (img.encoding() == Encoding::Gamma) out << " " << img.gamma();
  out << "\n";
  static const char* names[] = {"r", "g", "b"};
  const std::size_t n = img.pixel_count();
  for (int c = 0; c < N; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = img.values()[i * N + c];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    out << "  " << (N == 1 ? "value" : names[c]) << ": min " << lo << " max " << hi << " mean "
        << (n ? sum / static_cast<double>(n) : 0.0) << "\n";
  }
}

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  for (const std::string& f : a.files) require_file(f);
  out << std::setprecision(6);
  for (const std::string& f : a.files) {
    out << f << "\n";
    if (has_extension(f, ".png")) {
      out << "  format: png\n";
      print_stats(out, read_png(f));
    } else if (has_extension(f, ".pfm")) {
      out << "  format: pfm\n";
      std::visit([&](const auto& img) { print_stats(out, img); }, read_pfm(f));
    } else {
      throw FormatError("unsupported file type: " + f);
    }
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Light transport layer toolkit: data generation, composition, environment splitting, prefiltering, "
               "refinement and evaluation.",
               "lightlayers"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.footer("Exit codes: 0 success, 1 usage error, 2 I/O or data error.");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (gen-data)");
  app.add_option("--threads", g.threads, "Worker threads for gen-data, compose-dir, upsample and eval")
      ->check(CLI::PositiveNumber)
      ->default_val(1);
  app.add_flag("--verbose", g.verbose, "Progress messages on stderr");

  GenDataArgs gen;
  auto* genCmd = app.add_subcommand("gen-data", "Generate a synthetic layered dataset");
  genCmd->add_option("--config", gen.config, "YAML config (flags override its keys)");
  genCmd->add_option("--count", gen.count, "Number of records [100]")->check(CLI::NonNegativeNumber);
  genCmd->add_option("--resolution", gen.resolution, "Square image size [256]")->check(CLI::Range(8, 8192));
  genCmd->add_option("--env-width", gen.envWidth, "Environment map width, height is half [512]")
      ->check(CLI::Range(16, 16384));
  genCmd->add_flag("--directional", gen.directional, "Also write the six-direction layers");
  genCmd->add_option("--occlusion-samples", gen.occlusionSamples, "Occlusion rays per pixel [256]")
      ->check(CLI::PositiveNumber);
  genCmd->add_option("--occlusion-range-factor", gen.occlusionRangeFactor,
                     "Occlusion ray range as a fraction of the scene diameter [0.5]")
      ->check(CLI::PositiveNumber);
  genCmd->add_option("--sharpness", gen.sharpness, "Soft-cube sharpness [20]")->check(CLI::PositiveNumber);
  genCmd->add_option("--presets", gen.presets, "Environment presets to draw from [indoor outdoor studio]")
      ->check(CLI::IsMember({"indoor", "outdoor", "studio"}));
  genCmd->add_option("--out", gen.out, "Output directory [data]");

  ComposeArgs comp;
  auto* compCmd = app.add_subcommand("compose", "Compose a layer set into an image");
  compCmd->add_option("--layers", comp.layers, "Layer stem")->required();
  compCmd->add_option("--out", comp.out, "Output image (.png gamma-encoded, .pfm linear)")->required();
  compCmd->add_flag("--directional", comp.directional, "Use the directional layers");

  ComposeDirArgs compDir;
  auto* compDirCmd = app.add_subcommand("compose-dir", "Compose every record of a dataset directory");
  compDirCmd->add_option("--dir", compDir.dir, "Dataset directory")->required();
  compDirCmd->add_option("--out", compDir.out, "Output directory for <stem>.png")->required();
  compDirCmd->add_flag("--directional", compDir.directional, "Use the directional layers");

  SplitEnvArgs split;
  auto* splitCmd = app.add_subcommand("split-env", "Split an environment map into six soft-cube parts");
  splitCmd->add_option("--env", split.env, "Lat-long environment map (.pfm or .png)")->required();
  splitCmd->add_option("--out", split.out, "Output stem, writes <stem>.env0..5.pfm")->required();
  splitCmd->add_option("--sharpness", split.sharpness, "Soft-cube sharpness")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  PrefilterArgs pre;
  auto* preCmd = app.add_subcommand("prefilter", "Prefilter an environment map");
  preCmd->add_option("--env", pre.env, "Lat-long environment map (.pfm or .png)")->required();
  preCmd->add_option("--kind", pre.kind, "irr (diffuse irradiance) or gloss (Phong lobe)")
      ->required()
      ->check(CLI::IsMember({"irr", "gloss"}));
  preCmd->add_option("--n", pre.exponent, "Phong exponent, >= 1 (gloss only)")->check(CLI::Range(1.0, 1e9));
  preCmd->add_option("--width", pre.width, "Output width, height is half")
      ->check(CLI::Range(2, 8192))
      ->capture_default_str();
  preCmd->add_option("--out", pre.out, "Output .pfm")->required();

  UpsampleArgs up;
  auto* upCmd = app.add_subcommand("upsample", "Refine layers to the resolution of a high-resolution image");
  upCmd->add_option("--layers", up.layers, "Low-resolution layer stem")->required();
  upCmd->add_option("--hd", up.hd, "High-resolution input (.png gamma 2.0 or linear .pfm)")->required();
  upCmd->add_option("--out", up.out, "Output layer stem")->required();
  upCmd->add_option("--iterations", up.iterations, "Refinement iterations per pixel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  upCmd->add_option("--weight", up.weight, "Blend weight per solve, in (0, 1]")
      ->check(CLI::Validator(
          [](std::string& text) {
            double v = 0.0;
            if (!CLI::detail::lexical_cast(text, v) || !(v > 0.0 && v <= 1.0)) return std::string("value must be in (0, 1]");
            return std::string();
          },
          "FLOAT in (0, 1]"))
      ->capture_default_str();
  upCmd->add_option("--epsilon", up.epsilon, "Division guard")->check(CLI::PositiveNumber)->capture_default_str();
  upCmd->add_flag("--no-finalize", up.noFinalize, "Skip the final exact specular solve");

  EvalArgs ev;
  auto* evCmd = app.add_subcommand("eval", "Score a decomposition against ground truth");
  evCmd->add_option("--pred", ev.pred, "Predicted layer stem, or a directory of records")->required();
  evCmd->add_option("--gt", ev.gt, "Ground-truth layer stem, or a directory of records")->required();
  evCmd->add_option("--image", ev.image, "Input image for the residuals [compose(gt)]");
  evCmd->add_option("--report", ev.report, "Report file [stdout]");
  evCmd->add_option("--nrmse", ev.norm, "NRMSE normalization: euclidean or minmax")
      ->check(CLI::IsMember({"euclidean", "minmax"}))
      ->capture_default_str();

  InspectArgs ins;
  auto* insCmd = app.add_subcommand("inspect", "Print size, encoding and value range of image files");
  insCmd->add_option("files", ins.files, "PNG or PFM files")->required();

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->footer("Global options (accepted before or after the subcommand): --seed UINT, --threads INT, --verbose.\n"
                "Exit codes: 0 success, 1 usage error, 2 I/O or data error.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*genCmd) return cmd_gen_data(*genCmd, gen, g, out, err);
    if (*compCmd) return cmd_compose(comp, out);
    if (*compDirCmd) return cmd_compose_dir(compDir, g, out, err);
    if (*splitCmd) return cmd_split_env(split, out);
    if (*preCmd) return cmd_prefilter(*preCmd, pre, out);
    if (*upCmd) return cmd_upsample(up, g, out, err);
    if (*evCmd) return cmd_eval(ev, g, out, err);
    if (*insCmd) return cmd_inspect(ins, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lightlayers::cli
