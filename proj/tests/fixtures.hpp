#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"

namespace fixtures {

using patchweave::ImageGrid;
using patchweave::RegionMask;

inline ImageGrid random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  ImageGrid u(w, h);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = d(rng);
  return u;
}

inline RegionMask rect_hole(int w, int h, int row, int col, int rh, int cw, int r = 0) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int i = row; i < row + rh; ++i)
    for (int j = col; j < col + cw; ++j) m[static_cast<std::size_t>(i * w + j)] = 1;
  return RegionMask(w, h, std::move(m), r);
}

inline RegionMask centered_hole(int n, int side, int r = 0) {
  const int o = (n - side) / 2;
  return rect_hole(n, n, o, o, side, side, r);
}

inline RegionMask random_mask(int w, int h, std::uint64_t seed, double p, int r = 0) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution d(p);
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (auto& b : m) b = d(rng) ? 1 : 0;
  return RegionMask(w, h, std::move(m), r);
}

/// Vertical square-wave stripes.
inline ImageGrid stripes(int w, int h, int period, double lo, double hi) {
  ImageGrid u(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) u(r, c) = (c % period) < period / 2 ? lo : hi;
  return u;
}

/// Four flat quadrants with unequal split lines.
inline ImageGrid piecewise_constant(int n) {
  ImageGrid u(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) u(r, c) = (r < n / 2 ? 60.0 : 180.0) + (c < (5 * n) / 8 ? 0.0 : 40.0);
  return u;
}

inline std::filesystem::path tmpdir(const char* base) {
  std::filesystem::path p(base);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
