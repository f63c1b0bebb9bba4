#include "patchweave/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patchweave/errors.hpp"

namespace patchweave::reference {

WeightField update_weights(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                           double h, const SearchConfig& cfg, WeightDomain domain,
                           const Mollifier& m) {
  check_same_shape(u, mask);
  cfg.validate();
  if (!(h > 0.0)) throw ArgumentError("h must be positive");
  const RegionMask mk = mask.patch_radius() == k.radius() ? mask : dilate_mask(mask, k.radius());
  const ImageGrid src = m.is_delta() ? u : mollify(u, m);

  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cand;
  std::vector<double> weights;
  for (std::size_t x = 0; x < u.size(); ++x) {
    if (in_weight_domain(mk, domain, x)) {
      const Pixel px = u.pixel(x);
      const auto ys = candidate_set(px, cfg, mk);
      std::vector<double> d(ys.size());
      for (std::size_t j = 0; j < ys.size(); ++j) d[j] = patch_distance(src, px, u.pixel(ys[j]), k);

      std::vector<std::size_t> keep(ys.size());
      std::iota(keep.begin(), keep.end(), 0);
      if (cfg.top_k && static_cast<std::size_t>(*cfg.top_k) < keep.size()) {
        std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
        keep.resize(static_cast<std::size_t>(*cfg.top_k));
        std::sort(keep.begin(), keep.end());
      }
      double dmin = d[keep.front()];
      for (std::size_t j : keep) dmin = std::min(dmin, d[j]);
      std::vector<double> e(keep.size());
      double sum = 0.0;
      for (std::size_t t = 0; t < keep.size(); ++t) {
        e[t] = std::exp(-(d[keep[t]] - dmin) / h);
        sum += e[t];
      }
      for (std::size_t t = 0; t < keep.size(); ++t) {
        cand.push_back(static_cast<std::uint32_t>(ys[keep[t]]));
        weights.push_back(e[t] / sum);
      }
    }
    offsets.push_back(cand.size());
  }
  return WeightField(u.width(), u.height(), std::move(offsets), std::move(cand), std::move(weights));
}

ImageGrid update_image(const ImageGrid& u, const WeightField& w, const ImageGrid& v,
                       const RegionMask& mask, const SolverConfig& cfg) {
  check_same_shape(u, v);
  check_same_shape(u, mask);
  const RegionMask mk =
      mask.patch_radius() == cfg.kernel.radius() ? mask : dilate_mask(mask, cfg.kernel.radius());
  const auto lam = fidelity_weights(mk, cfg);
  const auto frozen = frozen_pixels(mk, cfg);
  const int W = u.width(), H = u.height();
  const auto pol = u.boundary_policy();
  const auto offs = cfg.kernel.offsets();
  const auto g = cfg.kernel.weights();

  std::vector<double> num(u.size(), 0.0), den(u.size(), 0.0);
  for (std::size_t x = 0; x < u.size(); ++x) {
    const Pixel px = u.pixel(x);
    const auto cand = w.candidates(x);
    const auto wv = w.weights(x);
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const Pixel py = u.pixel(cand[j]);
      for (std::size_t z = 0; z < offs.size(); ++z) {
        const double c = wv[j] * g[z];
        const std::size_t a = u.index(extend_index(px.row + offs[z].drow, H, pol),
                                      extend_index(px.col + offs[z].dcol, W, pol));
        const std::size_t b = u.index(extend_index(py.row + offs[z].drow, H, pol),
                                      extend_index(py.col + offs[z].dcol, W, pol));
        num[a] += c * u[b];
        den[a] += c;
        num[b] += c * u[a];
        den[b] += c;
      }
    }
  }
  ImageGrid out = u;
  for (std::size_t q = 0; q < u.size(); ++q) {
    if (frozen[q]) continue;
    const double denom = 2.0 * den[q] + lam[q];
    if (!(denom > 0.0)) {
      const Pixel p = u.pixel(q);
      throw SolverError("no weight mass and no fidelity", p.row, p.col);
    }
    out[q] = (2.0 * num[q] + lam[q] * v[q]) / denom;
  }
  return out;
}

}  // namespace patchweave::reference
