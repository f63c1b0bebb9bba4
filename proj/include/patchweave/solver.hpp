#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"
#include "patchweave/patch.hpp"
#include "patchweave/weights.hpp"

namespace patchweave {

/// Which part of the joint functional a solve minimizes.
enum class SolverMode {
  coupled,     ///< weights on all of the image, every pixel updated
  inpainting,  ///< weights only for x in O~
  denoising,   ///< weights for x in O^c, hole pixels frozen at their initial value
};

/// Pixels where the fidelity weight lambda is switched on.
enum class FidelityRegion { known, extended_known };

struct SolverConfig {
  double lambda = 2.0;
  double h = 200.0;
  double sigma = 10.0;
  double tol = 1e-5;
  int max_iters = 50;
  SolverMode mode = SolverMode::coupled;
  FidelityRegion fidelity_region = FidelityRegion::known;
  PatchKernel kernel = make_gaussian_kernel(2, 1.0);
  Mollifier mollifier = Mollifier::delta();
  SearchConfig search;

  void validate() const;
};

/// sigma used for parameter defaults when the noise level is 0.
inline constexpr double kNoiseFloorSigma = 10.0;

/// h = 2 sigma^2 (sigma floored at kNoiseFloorSigma when 0): the expected patch
/// error between two noisy copies of the same patch under a unit-mass g.
double default_h(double sigma) noexcept;
/// lambda = h / sigma^2, with the same floor.
double default_lambda(double h, double sigma) noexcept;
/// Library defaults for a noise level: r = 2, a = r/2, window 15, top-32.
SolverConfig default_config(double sigma, int patch_radius = 2);

WeightDomain weight_domain(SolverMode mode) noexcept;
/// lambda~ per pixel: lambda on the fidelity region, 0 elsewhere and on frozen pixels.
std::vector<double> fidelity_weights(const RegionMask& mask, const SolverConfig& cfg);
/// Pixels the image step leaves untouched (the hole in denoising mode).
std::vector<std::uint8_t> frozen_pixels(const RegionMask& mask, const SolverConfig& cfg);

struct EnergyBreakdown {
  int iter = 0;
  int level = 0;
  double fidelity = 0.0;
  double entropy_term = 0.0;
  double patch_term = 0.0;
  double total = 0.0;
  double rel_change = 0.0;
};

struct SolverState {
  ImageGrid u;
  WeightField w;
  int iter = 0;
  std::vector<EnergyBreakdown> trace;
  bool converged = false;
};

/// J(u, w) = (lambda/2) sum_F (u - v)^2 + h sum w ln w + sum eps(x,y) w(x,y),
/// F the fidelity region.
EnergyBreakdown energy(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg);

/// Per-pixel terms of the EM surrogate
///   H(u, w) = sum_x sum_y w(x,y) [eps(x,y)/h + |B|/2 ln(pi h)] + sum_x sum_y w ln w.
/// Entry x is zero for pixels without a distribution.
std::vector<double> em_surrogate_terms(const ImageGrid& u, const WeightField& w,
                                       const PatchKernel& k, double h,
                                       const Mollifier& m = Mollifier::delta());
double em_surrogate(const ImageGrid& u, const WeightField& w, const PatchKernel& k, double h,
                    const Mollifier& m = Mollifier::delta());

/// -sum_{x in domain} ln sum_{y} delta_h(u_B(x) - u_B(y)) with
/// delta_h = (pi h)^{-|B|/2} exp(-eps/h), over the candidate sets of `search`
/// (top_k ignored). Evaluated in log space.
double mixture_neg_log_likelihood(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                                  double h, const SearchConfig& search = {SearchConfig::unbounded, {}, 1},
                                  WeightDomain domain = WeightDomain::all,
                                  const Mollifier& m = Mollifier::delta());

/// Row normalization w* = f / sum_y f. `f` stores nonnegative entries in the
/// weight layout. Throws ArgumentError on a row with zero or non-finite mass.
WeightField closed_form_weights(const WeightField& f);

struct LogSumCheck {
  double lhs = 0.0;        ///< -sum_x ln sum_y f
  double rhs = 0.0;        ///< P(w*) at the closed-form minimizer
  double min_probe = 0.0;  ///< smallest P over the random simplex probes
  int probes = 0;
};

/// Evaluates both sides of the log-sum / entropy-min identity for a strictly
/// positive dense f, plus P at `probes` random points of the row simplices.
LogSumCheck logsum_min_oracle(const Eigen::MatrixXd& f, int probes = 100, std::uint64_t seed = 0);

/// M-step as a pointwise Jacobi sweep:
///   u'(q) = [2 sum g(z) u(y+z) (w~(q-z,y) + w~(y,q-z)) + lambda~ v(q)]
///         / [2 sum g(z) (w~(q-z,y) + w~(y,q-z)) + lambda~].
/// Pairs are accumulated through the boundary policy so the sweep is the exact
/// Jacobi step of J in u. Parallel gather over output pixels, thread-count
/// independent. Throws SolverError at a pixel with zero denominator.
ImageGrid update_image(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg);
ImageGrid update_image(const SolverState& state, const ImageGrid& v, const RegionMask& mask,
                       const SolverConfig& cfg);

/// One weight step then one image step; appends the energy at the new pair.
SolverState iterate(SolverState state, const ImageGrid& v, const RegionMask& mask,
                    const SolverConfig& cfg);

/// Alternates until ||u^{n+1} - u^n||^2 / ||u^n||^2 < tol or max_iters.
/// A search window that leaves some pixel without candidates is widened (with a
/// warning) until it does not.
SolverState solve(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                  const ImageGrid& u0);

/// Hole pixels set to the mean of known pixels in a window x window square
/// (global known mean where the window holds none); known pixels copied from v.
ImageGrid initial_fill(const ImageGrid& v, const RegionMask& mask, int window = 21);

/// Two passes: multiscale inpainting inside O, then denoising of O^c with the
/// hole frozen at the first pass's result. `n_levels` <= 0 picks default_levels.
SolverState solve_decoupled(const ImageGrid& v, const RegionMask& mask, const SolverConfig& cfg,
                            int n_levels = 0);

/// Quadratic M-step system in split form: A = diag(diagonal) - coupling, so the
/// Jacobi iteration reads u' = (coupling u + rhs) / diagonal. Frozen pixels are
/// identity rows with rhs = u.
struct MStepSystem {
  Eigen::VectorXd diagonal;
  Eigen::MatrixXd coupling;
  Eigen::VectorXd rhs;

  Eigen::MatrixXd matrix() const;
};

/// Dense assembly by direct enumeration of (x, y, z). Desk-scale images only.
MStepSystem assemble_mstep_system(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                                  const RegionMask& mask, const SolverConfig& cfg);

/// Exact minimizer of J(., w) by a dense solve. Throws SolverError naming an
/// isolated pixel, or when the system is singular.
ImageGrid exact_mstep_oracle(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                             const RegionMask& mask, const SolverConfig& cfg);

/// `iter,fidelity,entropy,patch,total,rel_change`
void write_trace_csv(std::ostream& out, const std::vector<EnergyBreakdown>& trace);

}  // namespace patchweave
