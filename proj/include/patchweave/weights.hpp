#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "patchweave/image.hpp"
#include "patchweave/mask.hpp"
#include "patchweave/patch.hpp"

namespace patchweave {

struct SearchConfig {
  static constexpr int unbounded = std::numeric_limits<int>::max();

  /// Half-width of the square candidate window; `unbounded` scans all of O~^c.
  int search_radius = 15;
  /// Keep only the K largest weights per pixel, then renormalize.
  std::optional<int> top_k = 32;
  /// Candidates are restricted to rows and columns that are multiples of stride.
  int stride = 1;

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
};

/// Which pixels x carry a distribution w(x, .).
enum class WeightDomain {
  all,            ///< every pixel of the image
  extended_hole,  ///< x in O~ (inpainting)
  known,          ///< x in O^c (denoising with the hole frozen)
};

bool in_weight_domain(const RegionMask& mask, WeightDomain domain, std::size_t x) noexcept;

/// Admissible candidate centers for x: O~^c inside the window, on the stride grid,
/// row-major. Throws EmptyCandidateSetError when none exist.
std::vector<std::size_t> candidate_set(Pixel x, const SearchConfig& cfg, const RegionMask& mask);

/// Candidate lists for every pixel of a weight domain in CSR form. Independent of
/// the image values, so a solver builds it once per level.
struct CandidateLayout {
  int width = 0;
  int height = 0;
  int search_radius = SearchConfig::unbounded;
  WeightDomain domain = WeightDomain::all;
  std::vector<std::size_t> offsets;  // size width*height + 1
  std::vector<std::uint32_t> candidates;
  /// Candidate flag per pixel (in O~^c and on the stride grid).
  std::vector<std::uint8_t> admissible;
};

/// Throws EmptyCandidateSetError for the first domain pixel without candidates.
CandidateLayout build_candidate_layout(const RegionMask& mask, const SearchConfig& cfg,
                                       WeightDomain domain);

/// Sparse per-pixel distributions w(x, .) over candidate centers in O~^c.
/// Rows are stored in CSR form with candidates in ascending (row-major) order.
class WeightField {
 public:
  WeightField() = default;
  WeightField(int width, int height, std::vector<std::size_t> offsets,
              std::vector<std::uint32_t> candidates, std::vector<double> weights);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t nnz() const noexcept { return weights_.size(); }

  bool has_distribution(std::size_t x) const noexcept { return offsets_[x + 1] > offsets_[x]; }
  std::span<const std::uint32_t> candidates(std::size_t x) const noexcept {
    return std::span(candidates_).subspan(offsets_[x], offsets_[x + 1] - offsets_[x]);
  }
  std::span<const double> weights(std::size_t x) const noexcept {
    return std::span(weights_).subspan(offsets_[x], offsets_[x + 1] - offsets_[x]);
  }
  /// Stored w(x, y), 0 when y is not stored for x.
  double weight(std::size_t x, std::size_t y) const noexcept;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const std::uint32_t> all_candidates() const noexcept { return candidates_; }
  std::span<const double> all_weights() const noexcept { return weights_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> candidates_;
  std::vector<double> weights_;
};

/// E-step: w(x,y) = exp(-eps(x,y)/h) / sum_y' exp(-eps(x,y')/h) over the candidate
/// set of each domain pixel, evaluated with max-subtraction. With top_k the K
/// smallest distances survive (ties keep the earlier candidate) and are renormalized.
///
/// Distances are accumulated per displacement: a squared-difference image for
/// each window offset is filtered with the separable kernel, parallel over bands
/// of rows. Results do not depend on the thread count.
WeightField update_weights(const ImageGrid& u, const RegionMask& mask, const PatchKernel& k,
                           double h, const SearchConfig& cfg,
                           WeightDomain domain = WeightDomain::all,
                           const Mollifier& m = Mollifier::delta());

WeightField update_weights(const ImageGrid& u, const CandidateLayout& layout, const PatchKernel& k,
                           double h, std::optional<int> top_k,
                           const Mollifier& m = Mollifier::delta());

/// Patch distances for every stored (x, y) of `layout`, same CSR order.
std::vector<double> layout_distances(const ImageGrid& u, const CandidateLayout& layout,
                                     const PatchKernel& k, const Mollifier& m = Mollifier::delta());

/// sum_x sum_y w ln w with 0 ln 0 = 0.
double entropy(const WeightField& w);

/// Zero extension w~: the stored weight when x lies in the image and y is stored
/// for x, otherwise 0.
double extended_weight(const WeightField& w, Pixel x, Pixel y) noexcept;

/// Dumps w(x, .) as CSV `y_row,y_col,weight`.
void write_distribution_csv(std::ostream& out, const WeightField& w, Pixel x);

/// Throws ArgumentError when any stored weight leaves [0,1] or a row does not sum to 1.
void validate_weights(const WeightField& w, double tol = 1e-9);

}  // namespace patchweave
