#include "patchweave/patch.hpp"

#include <cmath>

#include "patchweave/errors.hpp"

namespace patchweave {

PatchKernel::PatchKernel() : profile_{1.0}, offsets_{Offset{0, 0}}, weights_{1.0} {}

PatchKernel make_gaussian_kernel(int r, double a) {
  if (r < 0) throw ArgumentError("patch radius must be nonnegative");
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("kernel width must be positive");
  PatchKernel k;
  k.radius_ = r;
  k.shape_ = a;
  const std::size_t n = static_cast<std::size_t>(2 * r + 1);
  k.profile_.assign(n, 0.0);
  // exp(-(i^2 + j^2)/(2a^2)) = exp(-i^2/(2a^2)) exp(-j^2/(2a^2)): normalize the
  // 1-D factor and take the outer product.
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double g = std::exp(-static_cast<double>(i * i) / (2.0 * a * a));
    k.profile_[static_cast<std::size_t>(i + r)] = g;
    sum += g;
  }
  for (int i = 0; i <= r; ++i) {
    const double g = k.profile_[static_cast<std::size_t>(r + i)] / sum;
    k.profile_[static_cast<std::size_t>(r + i)] = g;
    k.profile_[static_cast<std::size_t>(r - i)] = g;
  }
  k.offsets_.clear();
  k.weights_.clear();
  for (int dr = -r; dr <= r; ++dr)
    for (int dc = -r; dc <= r; ++dc) {
      k.offsets_.push_back({dr, dc});
      k.weights_.push_back(k.weight(dr, dc));
    }
  return k;
}

double default_kernel_width(int r) noexcept { return r > 0 ? r / 2.0 : 0.5; }

Mollifier Mollifier::gaussian(int radius) {
  if (radius < 1) throw ArgumentError("gaussian mollifier radius must be at least 1");
  Mollifier m;
  m.kind_ = Kind::gaussian;
  m.kernel_ = make_gaussian_kernel(radius, default_kernel_width(radius));
  return m;
}

ImageGrid mollify(const ImageGrid& u, const Mollifier& m) {
  if (m.is_delta()) return u;
  const PatchKernel& k = m.kernel();
  const int r = k.radius();
  const PaddedImage p(u, r);
  const auto prof = k.profile();
  // Separable: rows then columns, both on the padded grid.
  const int w = u.width(), h = u.height();
  std::vector<double> tmp(static_cast<std::size_t>(h + 2 * r) * static_cast<std::size_t>(w));
  for (int y = -r; y < h + r; ++y) {
    const double* src = p.row_ptr(y);
    double* dst = tmp.data() + static_cast<std::size_t>(y + r) * static_cast<std::size_t>(w);
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int j = -r; j <= r; ++j) s += prof[static_cast<std::size_t>(j + r)] * src[x - j];
      dst[x] = s;
    }
  }
  ImageGrid out(w, h, 0.0, u.boundary_policy());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i)
        s += prof[static_cast<std::size_t>(i + r)] *
             tmp[static_cast<std::size_t>(y - i + r) * static_cast<std::size_t>(w) +
                 static_cast<std::size_t>(x)];
      out(y, x) = s;
    }
  return out;
}

double patch_distance(const ImageGrid& u, Pixel x, Pixel y, const PatchKernel& k,
                      const Mollifier& m) {
  if (!u.contains(x.row, x.col) || !u.contains(y.row, y.col))
    throw ArgumentError("patch centers must lie inside the image");
  if (!m.is_delta()) return patch_distance(mollify(u, m), x, y, k);
  double d = 0.0;
  const auto offs = k.offsets();
  const auto wts = k.weights();
  for (std::size_t i = 0; i < offs.size(); ++i) {
    const double diff = u.at_extended(x.row + offs[i].drow, x.col + offs[i].dcol) -
                        u.at_extended(y.row + offs[i].drow, y.col + offs[i].dcol);
    d += wts[i] * diff * diff;
  }
  return d;
}

double patch_distance(const PaddedImage& p, Pixel x, Pixel y, const PatchKernel& k) noexcept {
  const int r = k.radius();
  const auto wts = k.weights();
  double d = 0.0;
  std::size_t i = 0;
  for (int dr = -r; dr <= r; ++dr) {
    const double* a = p.row_ptr(x.row + dr) + x.col;
    const double* b = p.row_ptr(y.row + dr) + y.col;
    for (int dc = -r; dc <= r; ++dc, ++i) {
      const double diff = a[dc] - b[dc];
      d += wts[i] * diff * diff;
    }
  }
  return d;
}

}  // namespace patchweave
