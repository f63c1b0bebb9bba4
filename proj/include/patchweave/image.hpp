#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace patchweave {

enum class BoundaryPolicy { mirror, clamp };

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Folds an arbitrary coordinate into [0, n). Mirror is half-sample symmetric:
/// -1 -> 0, -2 -> 1, n -> n-1.
int extend_index(int i, int n, BoundaryPolicy policy) noexcept;

/// Row-major grayscale image on the 0..255 intensity scale.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int width, int height, double fill = 0.0,
            BoundaryPolicy policy = BoundaryPolicy::mirror);
  ImageGrid(int width, int height, std::vector<double> values,
            BoundaryPolicy policy = BoundaryPolicy::mirror);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  BoundaryPolicy boundary_policy() const noexcept { return policy_; }
  void set_boundary_policy(BoundaryPolicy p) noexcept { policy_ = p; }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }
  Pixel pixel(std::size_t i) const noexcept {
    return {static_cast<int>(i / static_cast<std::size_t>(width_)),
            static_cast<int>(i % static_cast<std::size_t>(width_))};
  }
  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  double& operator()(int row, int col) noexcept { return values_[index(row, col)]; }
  double operator()(int row, int col) const noexcept { return values_[index(row, col)]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Read with boundary extension; any (row, col) is valid.
  double at_extended(int row, int col) const noexcept {
    return values_[index(extend_index(row, height_, policy_), extend_index(col, width_, policy_))];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const noexcept;

 private:
  int width_ = 0;
  int height_ = 0;
  BoundaryPolicy policy_ = BoundaryPolicy::mirror;
  std::vector<double> values_;
};

/// Copy enlarged by `margin` on every side, filled through the boundary policy.
ImageGrid pad(const ImageGrid& u, int margin);

/// Padded view used by the patch kernels: reads at (row, col) with
/// -margin <= row < height + margin are plain index arithmetic.
class PaddedImage {
 public:
  PaddedImage(const ImageGrid& u, int margin);

  int margin() const noexcept { return margin_; }
  int stride() const noexcept { return stride_; }
  double at(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row + margin_) * static_cast<std::size_t>(stride_) +
                 static_cast<std::size_t>(col + margin_)];
  }
  /// Pointer to column 0 of `row` (so ptr[-margin] is valid).
  const double* row_ptr(int row) const noexcept {
    return data_.data() + static_cast<std::size_t>(row + margin_) * static_cast<std::size_t>(stride_) +
           static_cast<std::size_t>(margin_);
  }

 private:
  int margin_;
  int stride_;
  std::vector<double> data_;
};

}  // namespace patchweave
