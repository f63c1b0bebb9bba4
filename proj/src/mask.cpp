#include "patchweave/mask.hpp"

#include <algorithm>
#include <string>

#include "patchweave/errors.hpp"

namespace patchweave {

namespace {

// Square dilation as a row pass followed by a column pass.
std::vector<std::uint8_t> dilate_square(const std::vector<std::uint8_t>& in, int w, int h, int r) {
  if (r == 0) return in;
  std::vector<std::uint8_t> rows(in.size(), 0);
  for (int y = 0; y < h; ++y) {
    // Distance-to-last-hole sweep in both directions.
    int last = -(r + 1) - 1;
    for (int x = 0; x < w; ++x) {
      if (in[static_cast<std::size_t>(y * w + x)]) last = x;
      if (x - last <= r) rows[static_cast<std::size_t>(y * w + x)] = 1;
    }
    last = w + r + 1;
    for (int x = w - 1; x >= 0; --x) {
      if (in[static_cast<std::size_t>(y * w + x)]) last = x;
      if (last - x <= r) rows[static_cast<std::size_t>(y * w + x)] = 1;
    }
  }
  std::vector<std::uint8_t> out(in.size(), 0);
  for (int x = 0; x < w; ++x) {
    int last = -(r + 1) - 1;
    for (int y = 0; y < h; ++y) {
      if (rows[static_cast<std::size_t>(y * w + x)]) last = y;
      if (y - last <= r) out[static_cast<std::size_t>(y * w + x)] = 1;
    }
    last = h + r + 1;
    for (int y = h - 1; y >= 0; --y) {
      if (rows[static_cast<std::size_t>(y * w + x)]) last = y;
      if (last - y <= r) out[static_cast<std::size_t>(y * w + x)] = 1;
    }
  }
  return out;
}

}  // namespace

RegionMask::RegionMask(int width, int height, std::vector<std::uint8_t> hole, int patch_radius)
    : width_(width), height_(height), radius_(patch_radius), hole_(std::move(hole)) {
  if (width <= 0 || height <= 0) throw ArgumentError("mask dimensions must be positive");
  if (patch_radius < 0) throw ArgumentError("patch radius must be nonnegative");
  if (hole_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw ArgumentError("mask buffer size does not match " + std::to_string(width) + "x" +
                        std::to_string(height));
  for (auto& f : hole_) f = f ? 1 : 0;
  hole_count_ = static_cast<std::size_t>(std::count(hole_.begin(), hole_.end(), 1));
  extended_ = dilate_square(hole_, width_, height_, radius_);
  extended_count_ = static_cast<std::size_t>(std::count(extended_.begin(), extended_.end(), 1));
}

RegionMask RegionMask::none(int width, int height, int patch_radius) {
  return RegionMask(width, height,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(width) *
                                                  static_cast<std::size_t>(height),
                                              0),
                    patch_radius);
}

RegionMask dilate_mask(const RegionMask& mask, int r) {
  if (r < 0) throw ArgumentError("dilation radius must be nonnegative");
  return RegionMask(mask.width(), mask.height(),
                    std::vector<std::uint8_t>(mask.hole_flags().begin(), mask.hole_flags().end()),
                    r);
}

void check_same_shape(const ImageGrid& u, const RegionMask& mask) {
  if (!mask.same_shape(u))
    throw ConfigError("mask is " + std::to_string(mask.width()) + "x" +
                      std::to_string(mask.height()) + " but image is " +
                      std::to_string(u.width()) + "x" + std::to_string(u.height()));
}

void check_same_shape(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b))
    throw ConfigError("image sizes differ: " + std::to_string(a.width()) + "x" +
                      std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                      std::to_string(b.height()));
}

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::all: return "all";
    case Region::hole: return "hole";
    case Region::known: return "known";
    case Region::extended: return "extended";
    case Region::extended_known: return "extended_known";
  }
  return "?";
}

std::vector<std::size_t> region_pixels(const RegionMask& mask, Region r) {
  std::vector<std::size_t> out;
  out.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    bool in = false;
    switch (r) {
      case Region::all: in = true; break;
      case Region::hole: in = mask.hole(i); break;
      case Region::known: in = mask.known(i); break;
      case Region::extended: in = mask.extended(i); break;
      case Region::extended_known: in = mask.extended_known(i); break;
    }
    if (in) out.push_back(i);
  }
  return out;
}

}  // namespace patchweave
