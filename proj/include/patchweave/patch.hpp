#pragma once

#include <span>
#include <vector>

#include "patchweave/image.hpp"

namespace patchweave {

struct Offset {
  int drow = 0;
  int dcol = 0;
};

/// Patch support B_r (the (2r+1)x(2r+1) square) with intra-patch weights g.
///
/// g is the outer product of a symmetric 1-D profile, so g(z) = g(-z) holds
/// bit-for-bit and the kernel is separable. Weights sum to 1.
class PatchKernel {
 public:
  /// r = 0, single unit weight.
  PatchKernel();

  int radius() const noexcept { return radius_; }
  int diameter() const noexcept { return 2 * radius_ + 1; }
  std::size_t size() const noexcept { return weights_.size(); }
  double shape_param() const noexcept { return shape_; }

  /// 1-D factor indexed by k + radius, k in [-r, r].
  std::span<const double> profile() const noexcept { return profile_; }
  /// Row-major over the square, matching offsets().
  std::span<const Offset> offsets() const noexcept { return offsets_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(int drow, int dcol) const noexcept {
    return profile_[static_cast<std::size_t>(drow + radius_)] *
           profile_[static_cast<std::size_t>(dcol + radius_)];
  }

  friend PatchKernel make_gaussian_kernel(int r, double a);

 private:
  int radius_ = 0;
  double shape_ = 1.0;
  std::vector<double> profile_;
  std::vector<Offset> offsets_;
  std::vector<double> weights_;
};

/// g(z) proportional to exp(-|z|^2 / (2 a^2)) on B_r, normalized.
PatchKernel make_gaussian_kernel(int r, double a);

/// Default width a = r/2 (0.5 for r = 0).
double default_kernel_width(int r) noexcept;

/// Pre-smoothing applied before patches are compared.
class Mollifier {
 public:
  enum class Kind { delta, gaussian };

  static Mollifier delta() { return Mollifier{}; }
  /// Gaussian on the square of radius `radius`, width radius/2.
  static Mollifier gaussian(int radius);

  Kind kind() const noexcept { return kind_; }
  bool is_delta() const noexcept { return kind_ == Kind::delta; }
  const PatchKernel& kernel() const noexcept { return kernel_; }

 private:
  Kind kind_ = Kind::delta;
  PatchKernel kernel_;
};

/// (rho * u) with boundary extension; the delta mollifier returns u unchanged.
ImageGrid mollify(const ImageGrid& u, const Mollifier& m);

/// Patch error: sum_z g(z) [(rho*u)(x+z) - (rho*u)(y+z)]^2, reads beyond the
/// border go through the image's boundary policy.
double patch_distance(const ImageGrid& u, Pixel x, Pixel y, const PatchKernel& k,
                      const Mollifier& m = Mollifier::delta());

/// Same, on an image that is already mollified and padded by at least k.radius().
double patch_distance(const PaddedImage& mollified, Pixel x, Pixel y, const PatchKernel& k) noexcept;

}  // namespace patchweave
