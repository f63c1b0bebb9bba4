#include "patchweave/noise.hpp"

#include <random>

#include "patchweave/errors.hpp"

namespace patchweave {

ImageGrid add_gaussian_noise(const ImageGrid& u, const NoiseSpec& spec,
                             std::span<const std::size_t> region) {
  if (!(spec.sigma >= 0.0)) throw ArgumentError("noise sigma must be nonnegative");
  ImageGrid out = u;
  if (spec.sigma == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  for (std::size_t i : region) {
    if (i >= u.size()) throw ArgumentError("noise region index outside the image");
    out[i] += normal(rng);
  }
  return out;
}

}  // namespace patchweave
