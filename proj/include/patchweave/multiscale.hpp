#pragma once

#include <functional>
#include <vector>

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"
#include "patchweave/solver.hpp"

namespace patchweave {

struct PyramidLevel {
  ImageGrid image;
  RegionMask mask;
};

/// Dyadic pyramid, levels[0] coarsest, levels.back() the input.
struct Pyramid {
  std::vector<PyramidLevel> levels;
  int factor = 2;

  int n_levels() const noexcept { return static_cast<int>(levels.size()); }
};

/// Known-pixel-normalized 5-tap binomial prefilter, then decimation by 2.
/// A coarse pixel is a hole iff all of its fine children are holes.
/// Throws ConfigError when the coarsest level is smaller than twice the patch
/// diameter or has no candidate centers.
Pyramid build_pyramid(const ImageGrid& v, const RegionMask& mask, int n_levels);

/// Bilinear upsampling of `coarse` (coarse pixel i sits on fine pixel 2i), then
/// known fine pixels overwritten with `fine_v`.
ImageGrid upsample_init(const ImageGrid& coarse, const RegionMask& fine_mask, const ImageGrid& fine_v);

/// floor(log2(hole diameter / patch diameter)) + 1 clamped to [1, 4], where the
/// hole diameter is the largest min-side of a hole component's bounding box.
int default_levels(const RegionMask& mask);

using LevelCallback = std::function<void(int level, const SolverState& state)>;

/// Coarse to fine: solve the coarsest level from initial_fill, then every finer
/// level from upsample_init of the previous result. Returns the finest state with
/// the concatenated trace. `on_level` sees each level's final state.
SolverState solve_multiscale(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                             int n_levels, const LevelCallback& on_level = {});

}  // namespace patchweave
