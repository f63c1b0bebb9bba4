#include "patchweave/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "patchweave/errors.hpp"

namespace patchweave {

int extend_index(int i, int n, BoundaryPolicy policy) noexcept {
  if (i >= 0 && i < n) return i;
  if (policy == BoundaryPolicy::clamp) return i < 0 ? 0 : n - 1;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

ImageGrid::ImageGrid(int width, int height, double fill, BoundaryPolicy policy)
    : width_(width), height_(height), policy_(policy) {
  if (width <= 0 || height <= 0) throw ArgumentError("image dimensions must be positive");
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ImageGrid::ImageGrid(int width, int height, std::vector<double> values, BoundaryPolicy policy)
    : width_(width), height_(height), policy_(policy), values_(std::move(values)) {
  if (width <= 0 || height <= 0) throw ArgumentError("image dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ArgumentError("image buffer holds " + std::to_string(values_.size()) +
                        " values, expected " + std::to_string(width) + "x" +
                        std::to_string(height));
}

bool ImageGrid::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

ImageGrid pad(const ImageGrid& u, int margin) {
  if (margin < 0) throw ArgumentError("pad margin must be nonnegative");
  ImageGrid out(u.width() + 2 * margin, u.height() + 2 * margin, 0.0, u.boundary_policy());
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out(r, c) = u.at_extended(r - margin, c - margin);
  return out;
}

PaddedImage::PaddedImage(const ImageGrid& u, int margin)
    : margin_(margin), stride_(u.width() + 2 * margin) {
  if (margin < 0) throw ArgumentError("pad margin must be nonnegative");
  const int rows = u.height() + 2 * margin;
  data_.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(stride_));
  // Rows and columns fold independently, so extend one axis at a time.
  std::vector<int> col_src(static_cast<std::size_t>(stride_));
  for (int c = 0; c < stride_; ++c)
    col_src[static_cast<std::size_t>(c)] = extend_index(c - margin, u.width(), u.boundary_policy());
  for (int r = 0; r < rows; ++r) {
    const int src_row = extend_index(r - margin, u.height(), u.boundary_policy());
    double* dst = data_.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(stride_);
    for (int c = 0; c < stride_; ++c) dst[c] = u(src_row, col_src[static_cast<std::size_t>(c)]);
  }
}

}  // namespace patchweave
