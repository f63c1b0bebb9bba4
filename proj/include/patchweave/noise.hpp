#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "patchweave/image.hpp"

namespace patchweave {

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, sigma^2) samples on `region` (linear indices, visited in the
/// given order). The output is a pure function of (u, spec, region).
ImageGrid add_gaussian_noise(const ImageGrid& u, const NoiseSpec& spec,
                             std::span<const std::size_t> region);

}  // namespace patchweave
