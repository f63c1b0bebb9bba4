#pragma once

// Serial, loop-for-loop versions of the parallel kernels. Kept for tests and
// the benchmark; they follow the defining sums directly.

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"
#include "patchweave/patch.hpp"
#include "patchweave/solver.hpp"
#include "patchweave/weights.hpp"

namespace patchweave::reference {

/// Per-pair distances through candidate_set and patch_distance, plain softmax with
/// max-subtraction, stable top-k.
WeightField update_weights(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                           double h, const SearchConfig& cfg,
                           WeightDomain domain = WeightDomain::all,
                           const Mollifier& m = Mollifier::delta());

/// Scatter form of the image step: every (x, y, z) adds to both endpoints.
ImageGrid update_image(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg);

}  // namespace patchweave::reference
