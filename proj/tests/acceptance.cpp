// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "cli_runner.hpp"
#include "fixtures.hpp"
#include "patchweave/image_io.hpp"
#include "patchweave/log.hpp"
#include "patchweave/metrics.hpp"
#include "patchweave/multiscale.hpp"
#include "patchweave/noise.hpp"
#include "patchweave/solver.hpp"

using namespace patchweave;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kLogSumTol = 1e-10;
constexpr double kLogSumSeconds = 5.0;
constexpr double kSoftmaxTol = 1e-12;
constexpr double kRowSumTol = 1e-9;
constexpr double kJacobiTol = 1e-9;
constexpr double kGradientTol = 1e-8;
constexpr double kEnergyRelTol = 1e-6;
constexpr double kSurrogateTol = 1e-9;
constexpr double kConstantTol = 1e-6;
constexpr double kConstantSeconds = 30.0;
constexpr double kStripeMae = 2.0;
constexpr double kRestoreGainDb = 3.0;
constexpr double kRestoreSeconds = 60.0;
constexpr double kStageMae = 1.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome logsum_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> val(0.01, 10.0);
  double worst = 0.0;
  bool dominated = true;
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd f(dim(rng), dim(rng));
    for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = val(rng);
    const LogSumCheck c = logsum_min_oracle(f, 100, static_cast<std::uint64_t>(t));
    worst = std::max(worst, std::abs(c.lhs - c.rhs));
    dominated = dominated && c.rhs <= c.min_probe;
  }
  const double secs = seconds_since(t0);
  return {worst < kLogSumTol && dominated && secs < kLogSumSeconds,
          "max |lhs-rhs| " + fmt("%.2e", worst) + ", probes dominated " + (dominated ? "yes" : "no") + ", " +
              fmt("%.2f s", secs)};
}

Outcome softmax_equivalence() {
  double worst = 0.0, worst_sum = 0.0;
  const SearchConfig full{SearchConfig::unbounded, std::nullopt, 1};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImageGrid u = fixtures::random_image(16, 16, seed);
    const int r = 1 + static_cast<int>(seed % 2);
    const RegionMask m = fixtures::rect_hole(16, 16, 3 + static_cast<int>(seed % 5), 4, 3, 4, r);
    const PatchKernel k = make_gaussian_kernel(r, default_kernel_width(r));
    const double h = 100.0 + 150.0 * static_cast<double>(seed);
    const WeightField w = update_weights(u, m, k, h, full);

    // f(x,y) = exp(-eps/h) with eps from the per-pair distance.
    std::vector<std::size_t> off{0};
    std::vector<std::uint32_t> cand;
    std::vector<double> f;
    for (std::size_t x = 0; x < u.size(); ++x) {
      const Pixel px = u.pixel(x);
      for (std::size_t y : candidate_set(px, full, m)) {
        cand.push_back(static_cast<std::uint32_t>(y));
        f.push_back(std::exp(-patch_distance(u, px, u.pixel(y), k) / h));
      }
      off.push_back(cand.size());
    }
    const WeightField ref = closed_form_weights(WeightField(16, 16, off, cand, f));
    if (ref.nnz() != w.nnz()) return {false, "support mismatch at seed " + std::to_string(seed)};
    for (std::size_t i = 0; i < w.nnz(); ++i) {
      if (w.all_candidates()[i] != ref.all_candidates()[i]) return {false, "candidate order mismatch"};
      worst = std::max(worst, std::abs(w.all_weights()[i] - ref.all_weights()[i]));
    }
    for (std::size_t x = 0; x < w.pixel_count(); ++x) {
      double s = 0.0;
      for (double v : w.weights(x)) s += v;
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
  }
  return {worst <= kSoftmaxTol && worst_sum <= kRowSumTol,
          "max entry diff " + fmt("%.2e", worst) + ", max |row sum - 1| " + fmt("%.2e", worst_sum)};
}

Outcome mstep_consistency() {
  double worst_jac = 0.0, worst_grad = 0.0;
  const SolverMode modes[] = {SolverMode::coupled, SolverMode::inpainting, SolverMode::denoising};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ImageGrid u = fixtures::random_image(8, 8, seed);
    const ImageGrid v = fixtures::random_image(8, 8, seed + 100);
    const RegionMask m = fixtures::rect_hole(8, 8, 2 + static_cast<int>(seed % 4), 3, 2, 3, 1);
    SolverConfig cfg = default_config(10.0, 1);
    cfg.mode = modes[seed % 3];
    cfg.search = SearchConfig{3, 6, 1};
    const WeightField w = update_weights(u, m, cfg.kernel, cfg.h, cfg.search, weight_domain(cfg.mode));

    const MStepSystem sys = assemble_mstep_system(u, w, v, m, cfg);
    Eigen::VectorXd uv(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) uv(static_cast<Eigen::Index>(i)) = u[i];
    const Eigen::VectorXd jac = (sys.coupling * uv + sys.rhs).cwiseQuotient(sys.diagonal);
    const ImageGrid step = update_image(u, w, v, m, cfg);
    for (std::size_t i = 0; i < u.size(); ++i)
      worst_jac = std::max(worst_jac, std::abs(step[i] - jac(static_cast<Eigen::Index>(i))));

    const ImageGrid exact = exact_mstep_oracle(u, w, v, m, cfg);
    const auto frozen = frozen_pixels(m, cfg);
    auto objective = [&](const ImageGrid& x) {
      const EnergyBreakdown e = energy(x, w, v, m, cfg);
      return e.fidelity + e.patch_term;
    };
    for (std::size_t i = 0; i < exact.size(); ++i) {
      if (frozen[i]) continue;
      ImageGrid plus = exact, minus = exact;
      plus[i] += 4.0;
      minus[i] -= 4.0;
      worst_grad = std::max(worst_grad, std::abs((objective(plus) - objective(minus)) / 8.0));
    }
  }
  return {worst_jac <= kJacobiTol && worst_grad < kGradientTol,
          "max Jacobi diff " + fmt("%.2e", worst_jac) + ", max |grad| at oracle " + fmt("%.2e", worst_grad)};
}

Outcome energy_behavior() {
  double worst_j = -1e300, worst_h = -1e300;
  int steps = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RegionMask m = RegionMask::none(32, 32, 2);
    const ImageGrid g = fixtures::stripes(32, 32, 8, 60, 190);
    const ImageGrid v = add_gaussian_noise(g, {20.0, seed}, region_pixels(m, Region::all));
    SolverConfig cfg = default_config(20.0, 2);
    cfg.mode = SolverMode::denoising;
    SolverState s;
    s.u = v;
    s.w = update_weights(s.u, m, cfg.kernel, cfg.h, cfg.search, weight_domain(cfg.mode));
    double prev = energy(s.u, s.w, v, m, cfg).total;
    for (int it = 0; it < 30; ++it) {
      const WeightField next = update_weights(s.u, m, cfg.kernel, cfg.h, cfg.search, weight_domain(cfg.mode));
      const auto before = em_surrogate_terms(s.u, s.w, cfg.kernel, cfg.h);
      const auto after = em_surrogate_terms(s.u, next, cfg.kernel, cfg.h);
      double dh = 0.0;
      for (std::size_t x = 0; x < before.size(); ++x) dh += after[x] - before[x];
      worst_h = std::max(worst_h, dh);

      s.w = next;
      s.u = update_image(s, v, m, cfg);
      const double j = energy(s.u, s.w, v, m, cfg).total;
      worst_j = std::max(worst_j, (j - prev) / std::abs(prev));
      prev = j;
      ++steps;
    }
  }
  return {worst_j <= kEnergyRelTol && worst_h <= kSurrogateTol,
          std::to_string(steps) + " steps, max relative J increase " + fmt("%.2e", worst_j) +
              ", max H change in the weight step " + fmt("%.2e", worst_h)};
}

Outcome constant_recovery() {
  const auto t0 = Clock::now();
  const ImageGrid v(64, 64, 117.0);
  const RegionMask m = fixtures::centered_hole(64, 16, 2);
  const SolverConfig cfg = default_config(0.0, 2);
  const SolverState s = solve_multiscale(v, m, cfg, default_levels(m));
  double worst = 0.0;
  for (double x : s.u.values()) worst = std::max(worst, std::abs(x - 117.0));
  const double secs = seconds_since(t0);
  return {worst <= kConstantTol && secs < kConstantSeconds,
          "max abs error " + fmt("%.2e", worst) + ", " + fmt("%.2f s", secs)};
}

Outcome texture_inpainting() {
  const ImageGrid v = fixtures::stripes(64, 64, 8, 78, 178);
  const RegionMask m = fixtures::centered_hole(64, 16, 2);
  SolverConfig cfg = default_config(0.0, 2);
  cfg.mode = SolverMode::inpainting;
  const SolverState s = solve_multiscale(v, m, cfg, 3);
  const double mae = mean_abs_error(s.u, v, region_pixels(m, Region::hole));
  return {mae <= kStripeMae, "hole MAE " + fmt("%.3f", mae) + " gray levels"};
}

struct RestoreCase {
  ImageGrid clean, noisy;
  RegionMask mask;
};

RestoreCase restore_case(std::uint64_t seed) {
  RestoreCase c;
  c.clean = fixtures::piecewise_constant(64);
  c.mask = fixtures::centered_hole(64, 12, 2);
  c.noisy = add_gaussian_noise(c.clean, {10.0, seed}, region_pixels(c.mask, Region::known));
  return c;
}

Outcome simultaneous_restore() {
  double min_gain = 1e300, max_secs = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RestoreCase c = restore_case(seed);
    const auto t0 = Clock::now();
    const SolverState s = solve_multiscale(c.noisy, c.mask, default_config(10.0, 2), default_levels(c.mask));
    max_secs = std::max(max_secs, seconds_since(t0));
    const double in = psnr(c.noisy, c.clean, region_pixels(c.mask, Region::known));
    const double out = psnr(s.u, c.clean, region_pixels(c.mask, Region::all));
    min_gain = std::min(min_gain, out - in);
  }
  return {min_gain >= kRestoreGainDb && max_secs < kRestoreSeconds,
          "min PSNR gain " + fmt("%.2f dB", min_gain) + ", slowest run " + fmt("%.2f s", max_secs)};
}

Outcome decoupled_vs_denoise() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const RestoreCase c = restore_case(seed);
    const SolverConfig cfg = default_config(10.0, 2);
    const SolverState dec = solve_decoupled(c.noisy, c.mask, cfg);
    SolverConfig den = cfg;
    den.mode = SolverMode::denoising;
    const SolverState pure = solve(c.noisy, c.mask, den, initial_fill(c.noisy, c.mask));
    worst = std::max(worst, mean_abs_error(dec.u, pure.u, region_pixels(c.mask, Region::known)));
  }
  return {worst < kStageMae, "max known-region MAE " + fmt("%.3f", worst) + " gray levels"};
}

Outcome reproducibility() {
  const fs::path d = fixtures::tmpdir(PATCHWEAVE_TEST_TMPDIR);
  const auto q = [&](const std::string& n) { return cli::quote((d / n).string()); };
  write_image(d / "clean.pgm", fixtures::piecewise_constant(64));
  std::vector<std::string> artifacts;
  for (const char* run : {"a", "b", "t1", "t4"}) {
    const std::string tag(run);
    const std::string threads = tag == "t1" ? "--threads 1 " : tag == "t4" ? "--threads 4 " : "";
    const auto g = cli::run(threads + "degrade -i " + q("clean.pgm") + " -o " + q("deg_" + tag + ".pgm") +
                                " --mask 'rect(26,26,12,12)' --mask-out " + q("mask_" + tag + ".pgm") +
                                " --sigma 10 --seed 7",
                            d);
    if (g.code != 0) return {false, "degrade exited " + std::to_string(g.code) + ": " + g.err};
    const auto r = cli::run(threads + "restore -i " + q("deg_" + tag + ".pgm") + " -m " + q("mask_" + tag + ".pgm") +
                                " -o " + q("out_" + tag + ".pgm") + " --sigma 10 --trace " +
                                q("trace_" + tag + ".csv"),
                            d);
    if (r.code != 0) return {false, "restore exited " + std::to_string(r.code) + ": " + r.err};
    artifacts.push_back(cli::slurp(d / ("deg_" + tag + ".pgm")) + cli::slurp(d / ("mask_" + tag + ".pgm")) +
                        cli::slurp(d / ("out_" + tag + ".pgm")) + cli::slurp(d / ("trace_" + tag + ".csv")));
  }
  const bool runs = artifacts[0] == artifacts[1];
  const bool threads = artifacts[2] == artifacts[3] && artifacts[0] == artifacts[2];
  return {runs && threads, std::string("repeat runs identical ") + (runs ? "yes" : "no") +
                               ", --threads 1 vs 4 identical " + (threads ? "yes" : "no")};
}

Outcome io_contract() {
  const fs::path d = fixtures::tmpdir(PATCHWEAVE_TEST_TMPDIR);
  const auto q = [&](const std::string& n) { return cli::quote((d / n).string()); };
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> byte(0, 255);
  ImageGrid u(256, 256);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = byte(rng);
  write_pgm(d / "rt.pgm", u);
  const ImageGrid back = read_image(d / "rt.pgm");
  write_pgm(d / "rt2.pgm", back);
  const bool exact = std::equal(u.values().begin(), u.values().end(), back.values().begin()) &&
                     cli::slurp(d / "rt.pgm") == cli::slurp(d / "rt2.pgm");

  write_image(d / "img64.pgm", fixtures::piecewise_constant(64));
  write_mask(d / "mask32.pgm", fixtures::centered_hole(32, 4));
  write_mask(d / "empty64.pgm", RegionMask::none(64, 64));
  const int missing = cli::run("restore -i " + q("absent.pgm") + " -o " + q("x.pgm"), d).code;
  const int mismatch = cli::run("restore -i " + q("img64.pgm") + " -m " + q("mask32.pgm") + " -o " + q("x.pgm"), d).code;
  const int empty =
      cli::run("metrics " + q("img64.pgm") + " " + q("img64.pgm") + " -m " + q("empty64.pgm") + " --region hole", d)
          .code;
  return {exact && missing == 2 && mismatch == 3 && empty == 5,
          std::string("PGM round trip ") + (exact ? "bit-exact" : "differs") + ", exit codes missing=" +
              std::to_string(missing) + " mismatch=" + std::to_string(mismatch) +
              " empty-region=" + std::to_string(empty)};
}

}  // namespace

int main() {
  set_warning_sink({});
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"log-sum identity", logsum_identity},
      {"softmax equivalence", softmax_equivalence},
      {"M-step consistency", mstep_consistency},
      {"energy behavior", energy_behavior},
      {"constant recovery", constant_recovery},
      {"texture inpainting", texture_inpainting},
      {"simultaneous restore", simultaneous_restore},
      {"decoupled vs denoising", decoupled_vs_denoise},
      {"reproducibility", reproducibility},
      {"I/O and exit codes", io_contract},
  };
  int failed = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2d %-24s %s  (%s)\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
