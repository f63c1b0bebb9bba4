#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "patchweave/image.hpp"

namespace patchweave {

/// Hole labeling O plus the extended region O~ = O + B_r for a patch radius r.
///
/// Pixels are partitioned twice: hole / known (O, O^c) and extended / extended-known
/// (O~, O~^c). O~ holds every pixel whose (2r+1)x(2r+1) square touches the hole, so
/// candidate patches centered in O~^c never read a hole pixel.
class RegionMask {
 public:
  RegionMask() = default;
  /// Nonzero entries of `hole` mark members of O.
  RegionMask(int width, int height, std::vector<std::uint8_t> hole, int patch_radius = 0);

  static RegionMask none(int width, int height, int patch_radius = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return hole_.size(); }
  int patch_radius() const noexcept { return radius_; }

  bool hole(std::size_t i) const noexcept { return hole_[i] != 0; }
  bool known(std::size_t i) const noexcept { return hole_[i] == 0; }
  bool extended(std::size_t i) const noexcept { return extended_[i] != 0; }
  bool extended_known(std::size_t i) const noexcept { return extended_[i] == 0; }

  std::size_t hole_count() const noexcept { return hole_count_; }
  std::size_t extended_count() const noexcept { return extended_count_; }
  bool has_hole() const noexcept { return hole_count_ > 0; }

  std::span<const std::uint8_t> hole_flags() const noexcept { return hole_; }
  std::span<const std::uint8_t> extended_flags() const noexcept { return extended_; }

  bool same_shape(const ImageGrid& u) const noexcept {
    return u.width() == width_ && u.height() == height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int radius_ = 0;
  std::vector<std::uint8_t> hole_;
  std::vector<std::uint8_t> extended_;
  std::size_t hole_count_ = 0;
  std::size_t extended_count_ = 0;
};

/// Same hole, extended region rederived for radius r.
RegionMask dilate_mask(const RegionMask& mask, int r);

/// Throws ConfigError when the mask does not match the image dimensions.
void check_same_shape(const ImageGrid& u, const RegionMask& mask);
void check_same_shape(const ImageGrid& a, const ImageGrid& b);

enum class Region { all, hole, known, extended, extended_known };

std::string_view to_string(Region r) noexcept;

/// Linear indices of the region's pixels in ascending order.
std::vector<std::size_t> region_pixels(const RegionMask& mask, Region r);

}  // namespace patchweave
