#include <cmath>
#include <complex>

#include "doctest.h"
#include "expdyn/errors.hpp"
#include "expdyn/induced.hpp"
#include "gen.hpp"

using namespace expdyn;

namespace {

const ThinSetSpec kStrip = ThinSetSpec::horizontal_strip(0.0, kPi);

InducedGeometry geometry_m(std::int64_t M) {
  GeometryOptions opts;
  opts.M = M;
  return negative_geometry(1.0, 1.0, 2, 5, opts);
}

}  // namespace

TEST_SUITE("cover") {

TEST_CASE("depth zero is the base cell") {
  const auto g = geometry_m(10);
  const auto res = cover_iterate(1.0, kStrip, g, 0.5, 0, 100000);
  REQUIRE(res.levels.size() == 1);
  CHECK(res.levels[0].groups == 1);
  CHECK(res.levels[0].budget == doctest::Approx(2.0 * kPi + 1.0));
  CHECK(res.levels[0].total == doctest::Approx(std::pow(2.0 * kPi + 1.0, 1.5)));
  CHECK_FALSE(res.aborted);
}

TEST_CASE("totals stay under the budget and halve") {
  const auto g = geometry_m(10);
  const auto res = cover_iterate(1.0, kStrip, g, 0.5, 5, 100000);
  REQUIRE(res.levels.size() == 6);
  CHECK(res.levels[1].total < (2.0 * kPi + 1.0) / 2.0);
  for (std::size_t n = 1; n < res.levels.size(); ++n) {
    CHECK(res.levels[n].log_total < std::log(res.levels[n].budget));
    CHECK(res.levels[n].log_total - res.levels[n - 1].log_total < -std::log(2.0));
    CHECK(res.levels[n].budget == doctest::Approx((2.0 * kPi + 1.0) / std::pow(2.0, n)));
  }
}

TEST_CASE("branch cap aborts with partial results") {
  const auto g = geometry_m(10);
  const auto res = cover_iterate(1.0, kStrip, g, 0.5, 3, 1);
  CHECK(res.aborted);
  CHECK(res.note.rfind("branch cap exceeded at depth", 0) == 0);
  CHECK(res.levels.size() >= 1);
  CHECK(res.levels.size() < 4);
}

TEST_CASE("cover validation") {
  const auto g = geometry_m(10);
  CHECK_THROWS_AS(cover_iterate(1.0, kStrip, g, 0.0, 3, 10), ValidationError);
  CHECK_THROWS_AS(cover_iterate(1.0, kStrip, g, 0.5, -1, 10), ValidationError);
  CHECK_THROWS_AS(cover_iterate(1.0, kStrip, g, 0.5, 3, 0), ValidationError);
  CoverOptions bad;
  bad.start = RectangleIndex{3, 10};
  CHECK_THROWS_AS(cover_iterate(1.0, kStrip, g, 0.5, 3, 10, bad), ValidationError);
}

TEST_CASE("property: branch cells compose the induced map") {
  const auto g = geometry_m(5);
  gen::Gen gen(0xc0e);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    // points whose image lands back in the strip
    const double x = gen.uniform(5.0, 12.0);
    const Complex z(x, gen.uniform(0.0, 1.0) * kPi * std::exp(-x));
    const auto first = induced_apply(g, kStrip, z);
    REQUIRE(first.native.has_value());
    const auto second = induced_apply(g, kStrip, *first.native);
    const BranchCell cell = branch_of(g, kStrip, z, 2);
    REQUIRE(cell.steps.size() == 2);
    CHECK(cell.steps[0].iterates == first.iterates_used);
    CHECK(cell.steps[1].iterates == second.iterates_used);
    const LogPolarComplex img = cell.apply(g, kStrip, z);
    CHECK(img.log_modulus.to_double() ==
          doctest::Approx(second.image.log_modulus.to_double()).epsilon(1e-9));
    CHECK(std::fabs(img.argument - second.image.argument) < 1e-9);
    ++checked;
  }
  CHECK(checked == 500);
}

TEST_CASE("branch cells reject points outside their rectangles") {
  const auto g = geometry_m(5);
  const BranchCell cell = branch_of(g, kStrip, Complex(6.5, 0.001), 1);
  CHECK_THROWS_AS(cell.apply(g, kStrip, Complex(7.5, 0.001)), DomainError);
  CHECK(branch_of(g, kStrip, Complex(6.5, 0.001), 0).steps.empty());
}

}  // TEST_SUITE
