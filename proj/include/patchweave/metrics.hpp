#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "patchweave/image.hpp"

namespace patchweave {

/// Mean squared difference over `region`. Throws EmptyRegionError on an empty region.
double mse(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region);

/// 10 log10(peak^2 / mse); +infinity when the images agree on the region.
double psnr(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region,
            double peak = 255.0);

inline bool is_identical(double psnr_db) noexcept { return std::isinf(psnr_db) && psnr_db > 0; }

/// Mean absolute difference over `region`.
double mean_abs_error(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region);

}  // namespace patchweave
