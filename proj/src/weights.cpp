#include "patchweave/weights.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <optional>

#include "patchweave/errors.hpp"

namespace patchweave {

void SearchConfig::validate() const {
  if (search_radius < 1) throw ArgumentError("search radius must be at least 1");
  if (top_k && *top_k < 1) throw ArgumentError("top_k must be at least 1");
  if (stride < 1) throw ArgumentError("candidate stride must be at least 1");
}

bool in_weight_domain(const RegionMask& mask, WeightDomain domain, std::size_t x) noexcept {
  switch (domain) {
    case WeightDomain::all: return true;
    case WeightDomain::extended_hole: return mask.extended(x);
    case WeightDomain::known: return mask.known(x);
  }
  return false;
}

namespace {

struct Window {
  int r0, r1, c0, c1;  // half-open
};

Window window_of(Pixel x, int s, int w, int h) {
  if (s == SearchConfig::unbounded) return {0, h, 0, w};
  return {std::max(0, x.row - s), std::min(h, x.row + s + 1), std::max(0, x.col - s),
          std::min(w, x.col + s + 1)};
}

std::vector<std::uint8_t> admissible_flags(const RegionMask& mask, int stride) {
  std::vector<std::uint8_t> a(mask.size(), 0);
  for (int r = 0; r < mask.height(); r += stride)
    for (int c = 0; c < mask.width(); c += stride) {
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(mask.width()) +
                            static_cast<std::size_t>(c);
      a[i] = mask.extended_known(i) ? 1 : 0;
    }
  return a;
}

// Patch distances for every layout entry of pixels in rows [r0, r1), in CSR
// order relative to layout.offsets[first pixel of r0].
//
// For each displacement d the squared differences (U(q) - U(q + d))^2 are
// filtered with the separable profile, which yields eps(x, x + d) for every x
// of the band at once.
std::vector<double> band_distances(const PaddedImage& p, const CandidateLayout& layout,
                                   const PatchKernel& k, int r0, int r1) {
  const int W = layout.width, H = layout.height, r = k.radius();
  const std::size_t xb = static_cast<std::size_t>(r0) * static_cast<std::size_t>(W);
  const std::size_t xe = static_cast<std::size_t>(r1) * static_cast<std::size_t>(W);
  const std::size_t base = layout.offsets[xb];
  std::vector<double> dist(layout.offsets[xe] - base);
  if (dist.empty()) return dist;

  // Bounding box of the band's pixels that carry candidates.
  int br0 = r1, br1 = r0, bc0 = W, bc1 = 0;
  std::vector<std::size_t> cursor(xe - xb);
  for (std::size_t x = xb; x < xe; ++x) {
    cursor[x - xb] = layout.offsets[x] - base;
    if (layout.offsets[x + 1] == layout.offsets[x]) continue;
    const int row = static_cast<int>(x / static_cast<std::size_t>(W));
    const int col = static_cast<int>(x % static_cast<std::size_t>(W));
    br0 = std::min(br0, row);
    br1 = std::max(br1, row + 1);
    bc0 = std::min(bc0, col);
    bc1 = std::max(bc1, col + 1);
  }

  const int s = layout.search_radius;
  const int sr = s == SearchConfig::unbounded ? H - 1 : std::min(s, H - 1);
  const int sc = s == SearchConfig::unbounded ? W - 1 : std::min(s, W - 1);
  const auto prof = k.profile();
  std::vector<double> hs(static_cast<std::size_t>(br1 - br0 + 2 * r) * static_cast<std::size_t>(W));

  for (int dr = -sr; dr <= sr; ++dr) {
    const int xr_lo = std::max(br0, -dr), xr_hi = std::min(br1, H - dr);
    if (xr_lo >= xr_hi) continue;
    for (int dc = -sc; dc <= sc; ++dc) {
      const int xc_lo = std::max(bc0, -dc), xc_hi = std::min(bc1, W - dc);
      if (xc_lo >= xc_hi) continue;
      const int q0 = xr_lo - r;
      for (int q = q0; q < xr_hi + r; ++q) {
        const double* a = p.row_ptr(q);
        const double* b = p.row_ptr(q + dr) + dc;
        double* out = hs.data() + static_cast<std::size_t>(q - q0) * static_cast<std::size_t>(W);
        for (int xc = xc_lo; xc < xc_hi; ++xc) {
          double acc = 0.0;
          for (int j = -r; j <= r; ++j) {
            const double diff = a[xc + j] - b[xc + j];
            acc += prof[static_cast<std::size_t>(j + r)] * diff * diff;
          }
          out[xc] = acc;
        }
      }
      const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(dr) * W + dc;
      for (int xr = xr_lo; xr < xr_hi; ++xr) {
        for (int xc = xc_lo; xc < xc_hi; ++xc) {
          const std::size_t x = static_cast<std::size_t>(xr) * static_cast<std::size_t>(W) +
                                static_cast<std::size_t>(xc);
          if (layout.offsets[x + 1] == layout.offsets[x]) continue;
          const std::size_t y = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + shift);
          if (!layout.admissible[y]) continue;
          double eps = 0.0;
          for (int i = -r; i <= r; ++i)
            eps += prof[static_cast<std::size_t>(i + r)] *
                   hs[static_cast<std::size_t>(xr + i - q0) * static_cast<std::size_t>(W) +
                      static_cast<std::size_t>(xc)];
          dist[cursor[x - xb]++] = eps;
        }
      }
    }
  }
#ifndef NDEBUG
  for (std::size_t x = xb; x < xe; ++x) assert(cursor[x - xb] == layout.offsets[x + 1] - base);
#endif
  return dist;
}

constexpr int kBandRows = 8;

ImageGrid mollified(const ImageGrid& u, const Mollifier& m) { return m.is_delta() ? u : mollify(u, m); }

}  // namespace

std::vector<std::size_t> candidate_set(Pixel x, const SearchConfig& cfg, const RegionMask& mask) {
  cfg.validate();
  if (x.row < 0 || x.row >= mask.height() || x.col < 0 || x.col >= mask.width())
    throw ArgumentError("pixel outside the image");
  const Window win = window_of(x, cfg.search_radius, mask.width(), mask.height());
  std::vector<std::size_t> out;
  for (int r = win.r0; r < win.r1; ++r) {
    if (r % cfg.stride) continue;
    for (int c = win.c0; c < win.c1; ++c) {
      if (c % cfg.stride) continue;
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(mask.width()) +
                            static_cast<std::size_t>(c);
      if (mask.extended_known(i)) out.push_back(i);
    }
  }
  if (out.empty()) throw EmptyCandidateSetError(x.row, x.col);
  return out;
}

CandidateLayout build_candidate_layout(const RegionMask& mask, const SearchConfig& cfg,
                                       WeightDomain domain) {
  cfg.validate();
  CandidateLayout L;
  L.width = mask.width();
  L.height = mask.height();
  L.search_radius = cfg.search_radius;
  L.domain = domain;
  L.admissible = admissible_flags(mask, cfg.stride);

  const int W = L.width, H = L.height;
  const std::size_t N = mask.size();
  // Summed-area table of admissible flags for per-window counts.
  std::vector<std::size_t> sat(static_cast<std::size_t>(W + 1) * static_cast<std::size_t>(H + 1), 0);
  auto S = [&](int r, int c) -> std::size_t& {
    return sat[static_cast<std::size_t>(r) * static_cast<std::size_t>(W + 1) + static_cast<std::size_t>(c)];
  };
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c)
      S(r + 1, c + 1) = S(r, c + 1) + S(r + 1, c) - S(r, c) +
                        L.admissible[static_cast<std::size_t>(r) * static_cast<std::size_t>(W) +
                                     static_cast<std::size_t>(c)];

  L.offsets.assign(N + 1, 0);
  for (std::size_t x = 0; x < N; ++x) {
    std::size_t count = 0;
    if (in_weight_domain(mask, domain, x)) {
      const Pixel px{static_cast<int>(x / static_cast<std::size_t>(W)),
                     static_cast<int>(x % static_cast<std::size_t>(W))};
      const Window win = window_of(px, cfg.search_radius, W, H);
      count = S(win.r1, win.c1) - S(win.r0, win.c1) - S(win.r1, win.c0) + S(win.r0, win.c0);
      if (count == 0) throw EmptyCandidateSetError(px.row, px.col);
    }
    L.offsets[x + 1] = L.offsets[x] + count;
  }

  L.candidates.resize(L.offsets[N]);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < H; ++row) {
    for (int col = 0; col < W; ++col) {
      const std::size_t x = static_cast<std::size_t>(row) * static_cast<std::size_t>(W) +
                            static_cast<std::size_t>(col);
      if (L.offsets[x + 1] == L.offsets[x]) continue;
      const Window win = window_of({row, col}, cfg.search_radius, W, H);
      std::size_t k = L.offsets[x];
      for (int r = win.r0; r < win.r1; ++r)
        for (int c = win.c0; c < win.c1; ++c) {
          const std::size_t y = static_cast<std::size_t>(r) * static_cast<std::size_t>(W) +
                                static_cast<std::size_t>(c);
          if (L.admissible[y]) L.candidates[k++] = static_cast<std::uint32_t>(y);
        }
    }
  }
  return L;
}

std::vector<double> layout_distances(const ImageGrid& u, const CandidateLayout& layout,
                                     const PatchKernel& k, const Mollifier& m) {
  if (u.width() != layout.width || u.height() != layout.height)
    throw ConfigError("candidate layout does not match the image size");
  const PaddedImage p(mollified(u, m), k.radius());
  std::vector<double> out(layout.candidates.size());
  const int H = layout.height;
  const int bands = (H + kBandRows - 1) / kBandRows;
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < bands; ++b) {
    const int r0 = b * kBandRows, r1 = std::min(H, r0 + kBandRows);
    const auto d = band_distances(p, layout, k, r0, r1);
    std::copy(d.begin(), d.end(),
              out.begin() + static_cast<std::ptrdiff_t>(
                                layout.offsets[static_cast<std::size_t>(r0) *
                                               static_cast<std::size_t>(layout.width)]));
  }
  return out;
}

WeightField update_weights(const ImageGrid& u, const CandidateLayout& layout, const PatchKernel& k,
                           double h, std::optional<int> top_k, const Mollifier& m) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h must be positive and finite");
  if (top_k && *top_k < 1) throw ArgumentError("top_k must be at least 1");
  if (u.width() != layout.width || u.height() != layout.height)
    throw ConfigError("candidate layout does not match the image size");

  const std::size_t N = u.size();
  const int W = layout.width, H = layout.height;
  std::vector<std::size_t> out_off(N + 1, 0);
  for (std::size_t x = 0; x < N; ++x) {
    std::size_t cnt = layout.offsets[x + 1] - layout.offsets[x];
    if (top_k) cnt = std::min(cnt, static_cast<std::size_t>(*top_k));
    out_off[x + 1] = out_off[x] + cnt;
  }
  std::vector<std::uint32_t> out_c(out_off[N]);
  std::vector<double> out_w(out_off[N]);

  const PaddedImage p(mollified(u, m), k.radius());
  const int bands = (H + kBandRows - 1) / kBandRows;
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < bands; ++b) {
    const int r0 = b * kBandRows, r1 = std::min(H, r0 + kBandRows);
    const auto dist = band_distances(p, layout, k, r0, r1);
    const std::size_t xb = static_cast<std::size_t>(r0) * static_cast<std::size_t>(W);
    const std::size_t xe = static_cast<std::size_t>(r1) * static_cast<std::size_t>(W);
    const std::size_t base = layout.offsets[xb];
    std::vector<std::uint32_t> order;
    for (std::size_t x = xb; x < xe; ++x) {
      const std::size_t begin = layout.offsets[x] - base;
      const std::size_t cnt = layout.offsets[x + 1] - layout.offsets[x];
      if (cnt == 0) continue;
      const double* d = dist.data() + begin;
      const std::size_t kept = out_off[x + 1] - out_off[x];
      order.resize(cnt);
      std::iota(order.begin(), order.end(), 0u);
      if (kept < cnt) {
        // K smallest distances; ties go to the earlier candidate.
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kept - 1),
                         order.end(), [d](std::uint32_t a, std::uint32_t b) {
                           return d[a] < d[b] || (d[a] == d[b] && a < b);
                         });
        order.resize(kept);
        std::sort(order.begin(), order.end());
      }
      double dmin = d[order[0]];
      for (std::uint32_t j : order) dmin = std::min(dmin, d[j]);
      double sum = 0.0;
      double* wout = out_w.data() + out_off[x];
      for (std::size_t j = 0; j < kept; ++j) {
        wout[j] = std::exp(-(d[order[j]] - dmin) / h);
        sum += wout[j];
      }
      for (std::size_t j = 0; j < kept; ++j) {
        wout[j] /= sum;
        out_c[out_off[x] + j] = layout.candidates[layout.offsets[x] + order[j]];
      }
    }
  }
  return WeightField(W, H, std::move(out_off), std::move(out_c), std::move(out_w));
}

WeightField update_weights(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                           double h, const SearchConfig& cfg, WeightDomain domain,
                           const Mollifier& m) {
  check_same_shape(u, mask);
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h must be positive and finite");
  const RegionMask& mk = mask.patch_radius() == k.radius() ? mask : dilate_mask(mask, k.radius());
  return update_weights(u, build_candidate_layout(mk, cfg, domain), k, h, cfg.top_k, m);
}

WeightField::WeightField(int width, int height, std::vector<std::size_t> offsets,
                         std::vector<std::uint32_t> candidates, std::vector<double> weights)
    : width_(width),
      height_(height),
      offsets_(std::move(offsets)),
      candidates_(std::move(candidates)),
      weights_(std::move(weights)) {
  if (offsets_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) + 1 ||
      candidates_.size() != weights_.size() || offsets_.back() != weights_.size())
    throw ArgumentError("inconsistent weight field layout");
}

double WeightField::weight(std::size_t x, std::size_t y) const noexcept {
  const auto c = candidates(x);
  const auto it = std::lower_bound(c.begin(), c.end(), static_cast<std::uint32_t>(y));
  if (it == c.end() || *it != y) return 0.0;
  return weights_[offsets_[x] + static_cast<std::size_t>(it - c.begin())];
}

double entropy(const WeightField& w) {
  double s = 0.0;
  for (double v : w.all_weights())
    if (v > 0.0) s += v * std::log(v);
  return s;
}

double extended_weight(const WeightField& w, Pixel x, Pixel y) noexcept {
  if (x.row < 0 || x.row >= w.height() || x.col < 0 || x.col >= w.width()) return 0.0;
  if (y.row < 0 || y.row >= w.height() || y.col < 0 || y.col >= w.width()) return 0.0;
  const auto W = static_cast<std::size_t>(w.width());
  return w.weight(static_cast<std::size_t>(x.row) * W + static_cast<std::size_t>(x.col),
                  static_cast<std::size_t>(y.row) * W + static_cast<std::size_t>(y.col));
}

void write_distribution_csv(std::ostream& out, const WeightField& w, Pixel x) {
  out << "y_row,y_col,weight\n";
  if (x.row < 0 || x.row >= w.height() || x.col < 0 || x.col >= w.width()) return;
  const auto W = static_cast<std::size_t>(w.width());
  const std::size_t xi = static_cast<std::size_t>(x.row) * W + static_cast<std::size_t>(x.col);
  const auto c = w.candidates(xi);
  const auto v = w.weights(xi);
  out.precision(17);
  for (std::size_t j = 0; j < c.size(); ++j) out << c[j] / W << ',' << c[j] % W << ',' << v[j] << '\n';
}

void validate_weights(const WeightField& w, double tol) {
  for (std::size_t x = 0; x < w.pixel_count(); ++x) {
    if (!w.has_distribution(x)) continue;
    double sum = 0.0;
    for (double v : w.weights(x)) {
      if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError("weight outside [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) throw ArgumentError("weight row does not sum to 1");
  }
}

}  // namespace patchweave
