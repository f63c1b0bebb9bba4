#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "patchweave/multiscale.hpp"
#include "patchweave/parallel.hpp"
#include "patchweave/reference.hpp"
#include "patchweave/solver.hpp"

using namespace patchweave;

TEST_CASE("gather image step matches the serial scatter") {
  std::uint64_t seed = 0;
  for (auto mode : {SolverMode::coupled, SolverMode::inpainting, SolverMode::denoising})
    for (auto pol : {BoundaryPolicy::mirror, BoundaryPolicy::clamp})
      for (int r : {0, 1, 3}) {
        ImageGrid u = fixtures::random_image(21, 17, ++seed);
        u.set_boundary_policy(pol);
        const ImageGrid v = fixtures::random_image(21, 17, seed + 500);
        const RegionMask m = fixtures::rect_hole(21, 17, 5, 6, 4, 5, r);
        SolverConfig cfg = default_config(12.0, r);
        cfg.mode = mode;
        cfg.search = SearchConfig{6, 9, 1};
        const WeightField w = update_weights(u, m, cfg.kernel, cfg.h, cfg.search, weight_domain(mode));
        const ImageGrid a = update_image(u, w, v, m, cfg);
        const ImageGrid b = reference::update_image(u, w, v, m, cfg);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
      }
}

TEST_CASE("parallel kernels are bit-identical across thread counts") {
  const ImageGrid g = fixtures::piecewise_constant(48);
  const RegionMask m = fixtures::centered_hole(48, 10, 2);
  const ImageGrid v = fixtures::random_image(48, 48, 3, 0, 20);
  ImageGrid noisy = g;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (m.known(i)) noisy[i] += v[i] - 10.0;
  const SolverConfig cfg = default_config(10.0, 2);

  set_thread_count(1);
  const SolverState one = solve_multiscale(noisy, m, cfg, 2);
  set_thread_count(4);
  const SolverState four = solve_multiscale(noisy, m, cfg, 2);
  set_thread_count(0);
  CHECK(one.iter == four.iter);
  CHECK(std::equal(one.u.values().begin(), one.u.values().end(), four.u.values().begin()));
  REQUIRE(one.trace.size() == four.trace.size());
  for (std::size_t i = 0; i < one.trace.size(); ++i) CHECK(one.trace[i].total == four.trace[i].total);
}
