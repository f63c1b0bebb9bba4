#include "patchweave/metrics.hpp"

#include <cmath>
#include <limits>

#include "patchweave/errors.hpp"
#include "patchweave/mask.hpp"

namespace patchweave {

double mse(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region) {
  check_same_shape(a, b);
  if (region.empty()) throw EmptyRegionError("empty region");
  double sum = 0.0;
  for (std::size_t i : region) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(region.size());
}

double psnr(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region,
            double peak) {
  const double m = mse(a, b, region);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double mean_abs_error(const ImageGrid& a, const ImageGrid& b, std::span<const std::size_t> region) {
  check_same_shape(a, b);
  if (region.empty()) throw EmptyRegionError("empty region");
  double sum = 0.0;
  for (std::size_t i : region) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(region.size());
}

}  // namespace patchweave
