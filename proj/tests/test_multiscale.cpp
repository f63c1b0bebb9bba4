#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "patchweave/errors.hpp"
#include "patchweave/multiscale.hpp"

using namespace patchweave;

TEST_CASE("single level pyramid is the input") {
  const ImageGrid v = fixtures::random_image(20, 17, 1);
  const RegionMask m = fixtures::rect_hole(20, 17, 5, 5, 3, 3, 1);
  const Pyramid p = build_pyramid(v, m, 1);
  REQUIRE(p.n_levels() == 1);
  CHECK(std::equal(v.values().begin(), v.values().end(), p.levels[0].image.values().begin()));
  CHECK(p.levels[0].mask.hole_count() == m.hole_count());
}

TEST_CASE("pyramid dimensions and constant images") {
  const ImageGrid v(45, 38, 91.0);
  const RegionMask none = RegionMask::none(45, 38, 1);
  const Pyramid p = build_pyramid(v, none, 3);
  REQUIRE(p.n_levels() == 3);
  CHECK(p.levels[1].image.width() == 23);
  CHECK(p.levels[1].image.height() == 19);
  CHECK(p.levels[0].image.width() == 12);
  CHECK(p.levels[0].image.height() == 10);
  for (const auto& lev : p.levels) {
    CHECK(lev.mask.width() == lev.image.width());
    for (double x : lev.image.values()) CHECK(std::abs(x - 91.0) <= 1e-12);
  }
}

TEST_CASE("coarse level matches masked binomial filtering") {
  ImageGrid v(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) v(r, c) = ((r + c) % 2) ? 200.0 : 20.0;
  const RegionMask m = fixtures::rect_hole(32, 32, 9, 11, 6, 7, 1);
  const Pyramid p = build_pyramid(v, m, 2);
  const ImageGrid& coarse = p.levels[0].image;
  const double k[5] = {1, 4, 6, 4, 1};
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      double num = 0.0, mass = 0.0;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          const int rr = extend_index(2 * i + a, 32, BoundaryPolicy::mirror);
          const int cc = extend_index(2 * j + b, 32, BoundaryPolicy::mirror);
          if (m.hole(v.index(rr, cc))) continue;
          num += k[a + 2] * k[b + 2] * v(rr, cc);
          mass += k[a + 2] * k[b + 2];
        }
      if (!p.levels[0].mask.hole(coarse.index(i, j))) CHECK(coarse(i, j) == doctest::Approx(num / mass).epsilon(1e-12));
    }
}

TEST_CASE("coarse hole iff every child is a hole") {
  const RegionMask m = fixtures::random_mask(21, 18, 4, 0.6, 1);
  const Pyramid p = build_pyramid(ImageGrid(21, 18, 5.0), m, 2);
  const RegionMask& c = p.levels[0].mask;
  for (int i = 0; i < c.height(); ++i)
    for (int j = 0; j < c.width(); ++j) {
      bool all = true;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
          const int r = 2 * i + di, col = 2 * j + dj;
          if (r < 18 && col < 21 && m.known(static_cast<std::size_t>(r * 21 + col))) all = false;
        }
      CHECK(c.hole(static_cast<std::size_t>(i * c.width() + j)) == all);
    }
}

TEST_CASE("mask coarsening is monotone") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const RegionMask big = fixtures::random_mask(24, 24, seed, 0.7, 1);
    std::vector<std::uint8_t> smaller(big.hole_flags().begin(), big.hole_flags().end());
    for (std::size_t i = seed; i < smaller.size(); i += 5) smaller[i] = 0;
    const RegionMask small(24, 24, smaller, 1);
    const ImageGrid v(24, 24, 1.0);
    const Pyramid pb = build_pyramid(v, big, 2);
    const Pyramid ps = build_pyramid(v, small, 2);
    for (std::size_t i = 0; i < ps.levels[0].mask.size(); ++i)
      if (ps.levels[0].mask.hole(i)) CHECK(pb.levels[0].mask.hole(i));
  }
}

TEST_CASE("pyramid configuration errors") {
  const ImageGrid v(24, 24, 1.0);
  CHECK_THROWS_AS(build_pyramid(v, RegionMask::none(24, 24, 2), 3), ConfigError);
  CHECK_NOTHROW(build_pyramid(v, RegionMask::none(24, 24, 2), 2));
  CHECK_THROWS_AS(build_pyramid(v, fixtures::rect_hole(24, 24, 0, 0, 24, 24, 1), 1), ConfigError);
  CHECK_THROWS_AS(build_pyramid(v, RegionMask::none(24, 24), 0), ArgumentError);
}

TEST_CASE("upsampling") {
  const ImageGrid coarse(5, 4, 33.0);
  const ImageGrid fine_v = fixtures::random_image(10, 7, 2);
  const ImageGrid a = upsample_init(coarse, RegionMask::none(10, 7), fine_v);
  CHECK(std::equal(a.values().begin(), a.values().end(), fine_v.values().begin()));

  const RegionMask all = fixtures::rect_hole(10, 7, 0, 0, 7, 10);
  const ImageGrid b = upsample_init(coarse, all, fine_v);
  for (double x : b.values()) CHECK(x == doctest::Approx(33.0).epsilon(1e-15));

  ImageGrid ramp(5, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) ramp(i, j) = 2.0 * i + 5.0 * j;
  const ImageGrid c = upsample_init(ramp, all, fine_v);
  for (int r = 0; r < 7; ++r)
    for (int col = 0; col < 10; ++col) {
      const double fr = std::min(0.5 * r, 3.0), fc = std::min(0.5 * col, 4.0);
      CHECK(c(r, col) == doctest::Approx(2.0 * fr + 5.0 * fc).epsilon(1e-14));
    }
  CHECK_THROWS_AS(upsample_init(ImageGrid(4, 4), RegionMask::none(10, 7), fine_v), ConfigError);
}

TEST_CASE("default level count") {
  CHECK(default_levels(RegionMask::none(64, 64, 2)) == 1);
  CHECK(default_levels(fixtures::centered_hole(64, 4, 2)) == 1);
  CHECK(default_levels(fixtures::centered_hole(64, 10, 2)) == 2);
  CHECK(default_levels(fixtures::centered_hole(64, 16, 2)) == 2);
  CHECK(default_levels(fixtures::centered_hole(64, 20, 2)) == 3);
  CHECK(default_levels(fixtures::centered_hole(256, 200, 2)) == 4);
  // A thin scratch has a small diameter however long it is.
  CHECK(default_levels(fixtures::rect_hole(64, 64, 30, 2, 3, 60, 2)) == 1);
  // The image side caps the depth.
  CHECK(default_levels(fixtures::centered_hole(30, 26, 2)) == 2);
}

TEST_CASE("multiscale solves") {
  SolverConfig cfg = default_config(0.0, 2);

  SUBCASE("one level equals a plain solve") {
    const ImageGrid v = fixtures::stripes(32, 32, 6, 50, 150);
    const RegionMask m = fixtures::centered_hole(32, 6, 2);
    const SolverState a = solve_multiscale(v, m, cfg, 1);
    const SolverState b = solve(v, m, cfg, initial_fill(v, m));
    CHECK(std::equal(a.u.values().begin(), a.u.values().end(), b.u.values().begin()));
    CHECK(a.iter == b.iter);
  }
  SUBCASE("constants survive every level") {
    const ImageGrid v(48, 48, 123.0);
    const RegionMask m = fixtures::centered_hole(48, 14, 2);
    int seen = 0;
    const SolverState s = solve_multiscale(v, m, cfg, 2, [&](int level, const SolverState& st) {
      CHECK(level == seen++);
      CHECK(st.u.all_finite());
      for (double x : st.u.values()) CHECK(std::abs(x - 123.0) <= 1e-6);
    });
    CHECK(seen == 2);
    for (double x : s.u.values()) CHECK(std::abs(x - 123.0) <= 1e-6);
    CHECK(s.trace.front().level == 0);
    CHECK(s.trace.back().level == 1);
    CHECK(s.trace.back().iter == s.iter);
  }
}
