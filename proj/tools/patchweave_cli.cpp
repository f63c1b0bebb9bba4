// patchweave: restore, degrade and compare grayscale images.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "patchweave/errors.hpp"
#include "patchweave/image_io.hpp"
#include "patchweave/log.hpp"
#include "patchweave/metrics.hpp"
#include "patchweave/multiscale.hpp"
#include "patchweave/noise.hpp"
#include "patchweave/parallel.hpp"
#include "patchweave/solver.hpp"

namespace fs = std::filesystem;
using namespace patchweave;

namespace {

enum Exit { ok = 0, io_error = 2, validation = 3, solver_failure = 4, empty_region = 5 };

struct RestoreArgs {
  std::string input, mask, output, mode = "restore";
  double sigma = 0.0;
  std::optional<double> h, lambda, kernel_width;
  int patch_radius = 2;
  int search_radius = 15;
  int top_k = 32;
  int stride = 1;
  double tol = 1e-5;
  int max_iters = 50;
  int levels = 0;
  int mollifier_radius = 0;
  std::string fidelity = "known", boundary = "mirror";
  std::string trace, report, weights_csv;
  std::vector<int> weights_pixel;
  bool snapshots = false;
};

struct DegradeArgs {
  std::string input, output, mask_out, mask_spec;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct MetricsArgs {
  std::string a, b, mask, region = "summary";
};

const std::map<std::string, SolverMode> kModes{{"inpaint", SolverMode::inpainting},
                                               {"denoise", SolverMode::denoising},
                                               {"restore", SolverMode::coupled},
                                               {"decoupled", SolverMode::coupled}};

SolverConfig build_config(const RestoreArgs& a) {
  SolverConfig cfg = default_config(a.sigma, a.patch_radius);
  if (a.kernel_width) cfg.kernel = make_gaussian_kernel(a.patch_radius, *a.kernel_width);
  if (a.h) cfg.h = *a.h;
  cfg.lambda = a.lambda ? *a.lambda : default_lambda(cfg.h, a.sigma);
  cfg.tol = a.tol;
  cfg.max_iters = a.max_iters;
  cfg.mode = kModes.at(a.mode);
  cfg.fidelity_region = a.fidelity == "known" ? FidelityRegion::known : FidelityRegion::extended_known;
  cfg.mollifier = a.mollifier_radius > 0 ? Mollifier::gaussian(a.mollifier_radius) : Mollifier::delta();
  cfg.search.search_radius = a.search_radius > 0 ? a.search_radius : SearchConfig::unbounded;
  cfg.search.top_k = a.top_k > 0 ? std::optional<int>(a.top_k) : std::nullopt;
  cfg.search.stride = a.stride;
  cfg.validate();
  return cfg;
}

fs::path snapshot_path(const fs::path& out, int level) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + "_L" + std::to_string(level) + out.extension().string());
  return p;
}

nlohmann::json energy_json(const EnergyBreakdown& e) {
  return {{"iter", e.iter},       {"level", e.level},           {"fidelity", e.fidelity},
          {"entropy", e.entropy_term}, {"patch", e.patch_term}, {"total", e.total},
          {"rel_change", e.rel_change}};
}

int cmd_restore(const RestoreArgs& a) {
  const SolverConfig cfg = build_config(a);
  ImageGrid v = read_image(a.input);
  v.set_boundary_policy(a.boundary == "clamp" ? BoundaryPolicy::clamp : BoundaryPolicy::mirror);
  const RegionMask mask =
      a.mask.empty() ? RegionMask::none(v.width(), v.height(), a.patch_radius) : read_mask(a.mask, a.patch_radius);
  check_same_shape(v, mask);
  const fs::path out(a.output);

  int levels = 1;
  SolverState state;
  if (a.mode == "denoise") {
    state = solve(v, mask, cfg, initial_fill(v, mask));
  } else if (a.mode == "decoupled") {
    levels = a.levels > 0 ? a.levels : default_levels(mask);
    if (a.snapshots) log_warning("per-level snapshots are not written in decoupled mode");
    state = solve_decoupled(v, mask, cfg, levels);
  } else {
    levels = a.levels > 0 ? a.levels : default_levels(mask);
    LevelCallback snap;
    if (a.snapshots)
      snap = [&](int level, const SolverState& s) { write_image(snapshot_path(out, level), s.u); };
    state = solve_multiscale(v, mask, cfg, levels, snap);
  }

  write_image(out, state.u);
  if (!a.trace.empty()) {
    std::ofstream t(a.trace);
    if (!t) throw IoError("cannot write " + a.trace);
    write_trace_csv(t, state.trace);
  }
  if (!a.weights_csv.empty()) {
    if (a.weights_pixel.size() != 2) throw ArgumentError("--weights-pixel takes ROW COL");
    const Pixel p{a.weights_pixel[0], a.weights_pixel[1]};
    if (!v.contains(p.row, p.col)) throw ArgumentError("--weights-pixel lies outside the image");
    std::ofstream wc(a.weights_csv);
    if (!wc) throw IoError("cannot write " + a.weights_csv);
    write_distribution_csv(wc, state.w, p);
  }
  if (!a.report.empty()) {
    nlohmann::json r;
    r["input"] = a.input;
    r["mask"] = a.mask;
    r["output"] = a.output;
    r["mode"] = a.mode;
    r["width"] = v.width();
    r["height"] = v.height();
    r["hole_pixels"] = mask.hole_count();
    r["params"] = {{"sigma", a.sigma},
                   {"h", cfg.h},
                   {"lambda", cfg.lambda},
                   {"patch_radius", cfg.kernel.radius()},
                   {"kernel_width", cfg.kernel.shape_param()},
                   {"search_radius", a.search_radius},
                   {"top_k", a.top_k},
                   {"stride", a.stride},
                   {"tol", cfg.tol},
                   {"max_iters", cfg.max_iters},
                   {"fidelity_region", a.fidelity},
                   {"boundary", a.boundary},
                   {"mollifier_radius", a.mollifier_radius}};
    r["levels"] = levels;
    r["iterations"] = state.iter;
    r["converged"] = state.converged;
    if (!state.trace.empty()) r["final_energy"] = energy_json(state.trace.back());
    std::ofstream rep(a.report);
    if (!rep) throw IoError("cannot write " + a.report);
    rep << r.dump(2) << '\n';
  }
  return ok;
}

RegionMask parse_mask_spec(const std::string& spec, int width, int height) {
  if (spec.empty()) return RegionMask::none(width, height);
  std::smatch m;
  std::vector<std::uint8_t> hole(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  auto fill = [&](int x, int y, int w, int h) {
    if (w <= 0 || h <= 0 || x < 0 || y < 0 || x + w > width || y + h > height)
      throw ArgumentError("mask rectangle " + std::to_string(w) + "x" + std::to_string(h) + "+" +
                          std::to_string(x) + "+" + std::to_string(y) + " does not fit the image");
    for (int r = y; r < y + h; ++r)
      for (int c = x; c < x + w; ++c) hole[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + c] = 1;
  };
  static const std::regex rect(R"(rect\((\d+),(\d+),(\d+),(\d+)\))");
  static const std::regex blocks(R"(random_blocks\((\d+),(\d+),(\d+)\))");
  if (std::regex_match(spec, m, rect)) {
    fill(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4]));
  } else if (std::regex_match(spec, m, blocks)) {
    const int n = std::stoi(m[1]), size = std::stoi(m[2]);
    if (size <= 0 || size > width || size > height) throw ArgumentError("block size does not fit the image");
    std::mt19937_64 rng(std::stoull(m[3]));
    std::uniform_int_distribution<int> xs(0, width - size), ys(0, height - size);
    for (int i = 0; i < n; ++i) {
      const int x = xs(rng);
      fill(x, ys(rng), size, size);
    }
  } else {
    const RegionMask file = read_mask(spec);
    if (file.width() != width || file.height() != height)
      throw ConfigError("mask file " + spec + " does not match the image size");
    return file;
  }
  return RegionMask(width, height, std::move(hole));
}

int cmd_degrade(const DegradeArgs& a) {
  const ImageGrid u = read_image(a.input);
  const RegionMask mask = parse_mask_spec(a.mask_spec, u.width(), u.height());
  ImageGrid out = add_gaussian_noise(u, {a.sigma, a.seed}, region_pixels(mask, Region::known));
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask.hole(i)) out[i] = 0.0;
  write_image(a.output, out);
  if (!a.mask_out.empty()) write_mask(a.mask_out, mask);
  return ok;
}

std::string format_psnr(double p) {
  if (is_identical(p)) return "inf";
  std::ostringstream s;
  s << p;
  return s.str();
}

int cmd_metrics(const MetricsArgs& a) {
  const ImageGrid x = read_image(a.a);
  const ImageGrid y = read_image(a.b);
  check_same_shape(x, y);
  const RegionMask mask = a.mask.empty() ? RegionMask::none(x.width(), x.height()) : read_mask(a.mask);
  check_same_shape(x, mask);

  auto line = [&](Region r) {
    const auto px = region_pixels(mask, r);
    std::cout << "region=" << to_string(r) << " mse=" << mse(x, y, px) << " psnr=" << format_psnr(psnr(x, y, px))
              << '\n';
  };
  if (a.region == "summary") {
    for (Region r : {Region::all, Region::hole, Region::known}) {
      if (region_pixels(mask, r).empty()) {
        std::cout << "region=" << to_string(r) << " empty\n";
        continue;
      }
      line(r);
    }
    return ok;
  }
  static const std::map<std::string, Region> names{{"all", Region::all},
                                                   {"hole", Region::hole},
                                                   {"known", Region::known},
                                                   {"extended", Region::extended},
                                                   {"extended_known", Region::extended_known}};
  line(names.at(a.region));
  return ok;
}

void apply_threads(std::optional<int> flag) {
  if (flag) {
    set_thread_count(*flag);
    return;
  }
  if (const char* env = std::getenv("PATCHWEAVE_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      log_warning(std::string("ignoring PATCHWEAVE_THREADS=") + env);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-based image inpainting and denoising"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (default: PATCHWEAVE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  RestoreArgs ra;
  auto* restore = app.add_subcommand("restore", "Fill the masked region and denoise the rest");
  restore->add_option("-i,--input", ra.input, "Degraded image (PGM or PNG)")->required();
  restore->add_option("-m,--mask", ra.mask, "Mask image, intensity >= 128 marks missing pixels");
  restore->add_option("-o,--output", ra.output, "Restored image")->required();
  restore->add_option("--mode", ra.mode)->check(CLI::IsMember({"inpaint", "denoise", "restore", "decoupled"}))
      ->capture_default_str();
  restore->add_option("--sigma", ra.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  restore->add_option("--h", ra.h, "Softmax temperature (default 2 sigma^2)");
  restore->add_option("--lambda", ra.lambda, "Fidelity weight (default h / sigma^2)");
  restore->add_option("--patch-radius", ra.patch_radius)->check(CLI::NonNegativeNumber)->capture_default_str();
  restore->add_option("--kernel-width", ra.kernel_width, "Gaussian width of the patch kernel (default r/2)");
  restore->add_option("--search-radius", ra.search_radius, "0 scans the whole image")->capture_default_str();
  restore->add_option("--top-k", ra.top_k, "0 keeps every candidate")->capture_default_str();
  restore->add_option("--stride", ra.stride)->check(CLI::PositiveNumber)->capture_default_str();
  restore->add_option("--tol", ra.tol)->capture_default_str();
  restore->add_option("--max-iters", ra.max_iters)->capture_default_str();
  restore->add_option("--levels", ra.levels, "Pyramid depth, 0 picks from the hole size")->capture_default_str();
  restore->add_option("--mollifier-radius", ra.mollifier_radius, "0 compares raw patches")->capture_default_str();
  restore->add_option("--fidelity-region", ra.fidelity)->check(CLI::IsMember({"known", "extended_known"}))
      ->capture_default_str();
  restore->add_option("--boundary", ra.boundary)->check(CLI::IsMember({"mirror", "clamp"}))->capture_default_str();
  restore->add_option("--trace", ra.trace, "Energy trace CSV");
  restore->add_option("--report", ra.report, "JSON run report");
  restore->add_option("--weights-pixel", ra.weights_pixel, "ROW COL whose final weights --weights-csv dumps")
      ->expected(2);
  restore->add_option("--weights-csv", ra.weights_csv);
  restore->add_flag("--snapshots", ra.snapshots, "Write <output>_L<k> after every pyramid level");

  DegradeArgs da;
  auto* degrade = app.add_subcommand("degrade", "Add noise outside a mask and blank the masked pixels");
  degrade->add_option("-i,--input", da.input)->required();
  degrade->add_option("-o,--output", da.output)->required();
  degrade->add_option("--mask", da.mask_spec, "rect(x,y,w,h), random_blocks(n,size,seed) or a mask file");
  degrade->add_option("--mask-out", da.mask_out, "Where to write the mask");
  degrade->add_option("--sigma", da.sigma)->check(CLI::NonNegativeNumber)->capture_default_str();
  degrade->add_option("--seed", da.seed)->capture_default_str();

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "MSE and PSNR between two images");
  metrics->add_option("a", ma.a)->required();
  metrics->add_option("b", ma.b)->required();
  metrics->add_option("-m,--mask", ma.mask);
  metrics->add_option("--region", ma.region, "summary prints all, hole and known")
      ->check(CLI::IsMember({"summary", "all", "hole", "known", "extended", "extended_known"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return validation;
  }

  try {
    apply_threads(threads);
    if (*restore) return cmd_restore(ra);
    if (*degrade) return cmd_degrade(da);
    return cmd_metrics(ma);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_error;
  } catch (const EmptyRegionError& e) {
    std::cerr << "error: empty region: " << e.what() << '\n';
    return empty_region;
  } catch (const SolverError& e) {
    std::cerr << "error: solver: " << e.what() << '\n';
    return solver_failure;
  } catch (const EmptyCandidateSetError& e) {
    std::cerr << "error: solver: " << e.what() << '\n';
    return solver_failure;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  }
}
