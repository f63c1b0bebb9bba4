#include "patchweave/multiscale.hpp"
#include "patchweave/solver.hpp"

namespace patchweave {

SolverState solve_decoupled(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                            int n_levels) {
  cfg.validate();
  check_same_shape(v, mask);
  const RegionMask mk =
      mask.patch_radius() == cfg.kernel.radius() ? mask : dilate_mask(mask, cfg.kernel.radius());

  SolverConfig inpaint = cfg;
  inpaint.mode = SolverMode::inpainting;
  SolverConfig denoise = cfg;
  denoise.mode = SolverMode::denoising;

  ImageGrid u0 = initial_fill(v, mk);
  std::vector<EnergyBreakdown> trace;
  int iters = 0, level = 0;
  if (mk.has_hole()) {
    const int levels = n_levels > 0 ? n_levels : default_levels(mk);
    const SolverState first = solve_multiscale(v, mk, inpaint, levels);
    for (std::size_t i = 0; i < u0.size(); ++i)
      if (mk.hole(i)) u0[i] = first.u[i];
    trace = first.trace;
    iters = first.iter;
    level = levels;
  }

  SolverState out = solve(v, mk, denoise, u0);
  for (EnergyBreakdown e : out.trace) {
    e.level = level;
    e.iter += iters;
    trace.push_back(e);
  }
  out.iter += iters;
  out.trace = std::move(trace);
  return out;
}

}  // namespace patchweave
