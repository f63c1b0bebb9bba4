#include <Eigen/LU>

#include "patchweave/errors.hpp"
#include "patchweave/solver.hpp"

namespace patchweave {

Eigen::MatrixXd MStepSystem::matrix() const {
  Eigen::MatrixXd a = -coupling;
  a.diagonal() += diagonal;
  return a;
}

MStepSystem assemble_mstep_system(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                                  const RegionMask& mask, const SolverConfig& cfg) {
  check_same_shape(u, v);
  check_same_shape(u, mask);
  if (u.width() != w.width() || u.height() != w.height())
    throw ConfigError("weight field does not match the image size");
  const RegionMask mk =
      mask.patch_radius() == cfg.kernel.radius() ? mask : dilate_mask(mask, cfg.kernel.radius());
  const auto lam = fidelity_weights(mk, cfg);
  const auto frozen = frozen_pixels(mk, cfg);

  const auto n = static_cast<Eigen::Index>(u.size());
  MStepSystem sys;
  sys.diagonal = Eigen::VectorXd::Zero(n);
  sys.coupling = Eigen::MatrixXd::Zero(n, n);
  sys.rhs = Eigen::VectorXd::Zero(n);

  const int W = u.width(), H = u.height();
  const auto pol = u.boundary_policy();
  const auto offs = cfg.kernel.offsets();
  const auto g = cfg.kernel.weights();
  for (std::size_t x = 0; x < u.size(); ++x) {
    const Pixel px = u.pixel(x);
    const auto cand = w.candidates(x);
    const auto wv = w.weights(x);
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const Pixel py = u.pixel(cand[j]);
      for (std::size_t z = 0; z < offs.size(); ++z) {
        const double c = wv[j] * g[z];
        const auto a = static_cast<Eigen::Index>(u.index(extend_index(px.row + offs[z].drow, H, pol),
                                                         extend_index(px.col + offs[z].dcol, W, pol)));
        const auto b = static_cast<Eigen::Index>(u.index(extend_index(py.row + offs[z].drow, H, pol),
                                                         extend_index(py.col + offs[z].dcol, W, pol)));
        // c (u_a - u_b)^2 differentiates to 2c(u_a - u_b) at a and 2c(u_b - u_a) at b.
        sys.diagonal(a) += 2.0 * c;
        sys.diagonal(b) += 2.0 * c;
        sys.coupling(a, b) += 2.0 * c;
        sys.coupling(b, a) += 2.0 * c;
      }
    }
  }
  for (Eigen::Index q = 0; q < n; ++q) {
    const auto i = static_cast<std::size_t>(q);
    if (frozen[i]) {
      sys.diagonal(q) = 1.0;
      sys.coupling.row(q).setZero();
      sys.rhs(q) = u[i];
    } else {
      sys.diagonal(q) += lam[i];
      sys.rhs(q) = lam[i] * v[i];
    }
  }
  return sys;
}

ImageGrid exact_mstep_oracle(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                             const RegionMask& mask, const SolverConfig& cfg) {
  const MStepSystem sys = assemble_mstep_system(u, w, v, mask, cfg);
  for (Eigen::Index q = 0; q < sys.diagonal.size(); ++q)
    if (!(sys.diagonal(q) > 0.0)) {
      const Pixel p = u.pixel(static_cast<std::size_t>(q));
      throw SolverError("isolated pixel: no patch pair and no fidelity term", p.row, p.col);
    }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.matrix());
  if (!lu.isInvertible()) throw SolverError("singular M-step system");
  const Eigen::VectorXd sol = lu.solve(sys.rhs);
  ImageGrid out(u.width(), u.height(), 0.0, u.boundary_policy());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sol(static_cast<Eigen::Index>(i));
  return out;
}

}  // namespace patchweave
