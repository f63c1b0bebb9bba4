#include "patchweave/multiscale.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "patchweave/errors.hpp"
#include "patchweave/log.hpp"

namespace patchweave {

namespace {

constexpr std::array<double, 5> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

PyramidLevel downsample(const PyramidLevel& fine) {
  const ImageGrid& v = fine.image;
  const RegionMask& m = fine.mask;
  const int W = v.width(), H = v.height();
  const int Wc = (W + 1) / 2, Hc = (H + 1) / 2;
  const auto pol = v.boundary_policy();
  ImageGrid out(Wc, Hc, 0.0, pol);
  std::vector<std::uint8_t> hole(static_cast<std::size_t>(Wc) * static_cast<std::size_t>(Hc), 0);
  for (int i = 0; i < Hc; ++i)
    for (int j = 0; j < Wc; ++j) {
      double num = 0.0, mass = 0.0;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          const std::size_t s = v.index(extend_index(2 * i + a, H, pol), extend_index(2 * j + b, W, pol));
          if (!m.known(s)) continue;
          const double k = kBinomial[static_cast<std::size_t>(a + 2)] * kBinomial[static_cast<std::size_t>(b + 2)];
          num += k * v[s];
          mass += k;
        }
      bool all_hole = true;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          const int r = 2 * i + di, c = 2 * j + dj;
          if (r < H && c < W && m.known(v.index(r, c))) all_hole = false;
        }
      const std::size_t q = out.index(i, j);
      hole[q] = all_hole ? 1 : 0;
      out[q] = mass > 0.0 ? num / mass : 0.0;
    }
  return {std::move(out), RegionMask(Wc, Hc, std::move(hole), m.patch_radius())};
}

}  // namespace

Pyramid build_pyramid(const ImageGrid& v, const RegionMask& mask, int n_levels) {
  check_same_shape(v, mask);
  if (n_levels < 1) throw ArgumentError("pyramid needs at least one level");
  Pyramid p;
  p.levels.push_back({v, mask});
  for (int l = 1; l < n_levels; ++l) p.levels.push_back(downsample(p.levels.back()));
  std::reverse(p.levels.begin(), p.levels.end());

  const PyramidLevel& top = p.levels.front();
  const int need = 2 * (2 * mask.patch_radius() + 1);
  if (std::min(top.image.width(), top.image.height()) < need)
    throw ConfigError("coarsest pyramid level is " + std::to_string(top.image.width()) + "x" +
                      std::to_string(top.image.height()) + ", smaller than twice the patch diameter");
  if (top.mask.extended_count() == top.mask.size())
    throw ConfigError("coarsest pyramid level has no candidate patch centers");
  return p;
}

ImageGrid upsample_init(const ImageGrid& coarse, const RegionMask& fine_mask, const ImageGrid& fine_v) {
  check_same_shape(fine_v, fine_mask);
  const int W = fine_v.width(), H = fine_v.height();
  const int Wc = coarse.width(), Hc = coarse.height();
  if (Wc != (W + 1) / 2 || Hc != (H + 1) / 2)
    throw ConfigError("coarse image is not the dyadic parent of the fine grid");
  ImageGrid out(W, H, 0.0, fine_v.boundary_policy());
  for (int r = 0; r < H; ++r) {
    const double fr = 0.5 * r;
    const int r0 = std::min(static_cast<int>(fr), Hc - 1), r1 = std::min(r0 + 1, Hc - 1);
    const double tr = fr - r0;
    for (int c = 0; c < W; ++c) {
      const std::size_t i = out.index(r, c);
      if (fine_mask.known(i)) {
        out[i] = fine_v[i];
        continue;
      }
      const double fc = 0.5 * c;
      const int c0 = std::min(static_cast<int>(fc), Wc - 1), c1 = std::min(c0 + 1, Wc - 1);
      const double tc = fc - c0;
      out[i] = (1 - tr) * ((1 - tc) * coarse(r0, c0) + tc * coarse(r0, c1)) +
               tr * ((1 - tc) * coarse(r1, c0) + tc * coarse(r1, c1));
    }
  }
  return out;
}

int default_levels(const RegionMask& mask) {
  const int W = mask.width(), H = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<std::size_t> stack;
  int diameter = 0;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (!mask.hole(s) || seen[s]) continue;
    int rmin = H, rmax = -1, cmin = W, cmax = -1;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const int r = static_cast<int>(i / static_cast<std::size_t>(W));
      const int c = static_cast<int>(i % static_cast<std::size_t>(W));
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
      const int nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& n : nb) {
        if (n[0] < 0 || n[0] >= H || n[1] < 0 || n[1] >= W) continue;
        const std::size_t j = static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(W) +
                              static_cast<std::size_t>(n[1]);
        if (mask.hole(j) && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    diameter = std::max(diameter, std::min(rmax - rmin + 1, cmax - cmin + 1));
  }
  if (diameter == 0) return 1;
  const int patch = 2 * mask.patch_radius() + 1;
  int levels = static_cast<int>(std::floor(std::log2(static_cast<double>(diameter) / patch))) + 1;
  levels = std::clamp(levels, 1, 4);
  // Keep the coarsest level at least twice the patch diameter.
  auto coarse_side = [&](int l) {
    int side = std::min(W, H);
    for (int i = 1; i < l; ++i) side = (side + 1) / 2;
    return side;
  };
  while (levels > 1 && coarse_side(levels) < 2 * patch) --levels;
  return levels;
}

SolverState solve_multiscale(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                             int n_levels, const LevelCallback& on_level) {
  cfg.validate();
  check_same_shape(v, mask);
  const RegionMask mk =
      mask.patch_radius() == cfg.kernel.radius() ? mask : dilate_mask(mask, cfg.kernel.radius());
  const Pyramid pyr = build_pyramid(v, mk, n_levels);

  SolverState state;
  std::vector<EnergyBreakdown> trace;
  int iters = 0;
  for (int l = 0; l < pyr.n_levels(); ++l) {
    const PyramidLevel& lev = pyr.levels[static_cast<std::size_t>(l)];
    const ImageGrid u0 = l == 0 ? initial_fill(lev.image, lev.mask)
                                : upsample_init(state.u, lev.mask, lev.image);
    SolverState s = solve(lev.image, lev.mask, cfg, u0);
    if (!s.converged)
      log_warning("level " + std::to_string(l) + " stopped at max_iters without reaching tol");
    for (EnergyBreakdown e : s.trace) {
      e.level = l;
      e.iter += iters;
      trace.push_back(e);
    }
    iters += s.iter;
    if (on_level) on_level(l, s);
    state = std::move(s);
  }
  state.trace = std::move(trace);
  state.iter = iters;
  return state;
}

}  // namespace patchweave
