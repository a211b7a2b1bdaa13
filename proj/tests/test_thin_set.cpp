#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "expdyn/errors.hpp"
#include "expdyn/thin_set.hpp"
#include "gen.hpp"

using namespace expdyn;

namespace {

std::vector<double> geometric_radii(double r0, double r1, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(r0 * std::pow(r1 / r0, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_SUITE("thin_set") {

TEST_CASE("horizontal strip is thin") {
  const auto spec = ThinSetSpec::horizontal_strip(0.0, kPi);
  const auto rep = thin_check(spec, geometric_radii(1.0, 1e4, 12), 4001);
  CHECK(rep.cone_ok);
  CHECK(rep.width_ok);
  CHECK(std::abs(rep.thinness_exponent) < 0.05);
  CHECK(rep.thin);
  CHECK(spec.cone_constant() <= kPi + 2.0);
  for (double w : rep.measured_widths) CHECK(w <= kPi);
  CHECK(spec.width(123.0) == doctest::Approx(kPi));
}

TEST_CASE("square-root band is not thin") {
  const auto spec = ThinSetSpec::cone_band(
      2.0, [](double R) { return std::sqrt(R); }, "sqrt-band", true);
  const auto rep = thin_check(spec, geometric_radii(10.0, 1e5, 12), 4001);
  CHECK(rep.cone_ok);
  CHECK(rep.width_ok);
  CHECK(rep.thinness_exponent == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(rep.thin);
}

TEST_CASE("vertical line fails the cone condition") {
  const auto spec = ThinSetSpec::custom([](Complex z) { return std::fabs(z.real()) <= 1e-9; },
                                        10.0, [](double) { return 1.0; }, "vertical");
  const auto rep = thin_check(spec, geometric_radii(1.0, 1e3, 8), 64);
  CHECK_FALSE(rep.cone_ok);
  CHECK_FALSE(rep.thin);
  CHECK(rep.worst_cone_ratio > 10.0);
  CHECK(rep.empty_slices.size() == 8);
}

TEST_CASE("understated width profile is caught") {
  const auto spec = ThinSetSpec::custom([](Complex z) { return std::fabs(z.imag()) <= 2.0; }, 4.0,
                                        [](double) { return 1.0; }, "liar");
  const auto rep = thin_check(spec, {2.0, 4.0, 8.0}, 257);
  CHECK_FALSE(rep.width_ok);
  CHECK_FALSE(rep.thin);
}

TEST_CASE("validation") {
  const auto spec = ThinSetSpec::horizontal_strip(0.0, 1.0);
  CHECK_THROWS_AS(thin_check(spec, {2.0, 1.0}, 64), ValidationError);
  CHECK_THROWS_AS(thin_check(spec, {0.5}, 64), ValidationError);
  CHECK_THROWS_AS(thin_check(spec, {2.0}, 4), ValidationError);
  CHECK_THROWS_AS(ThinSetSpec::horizontal_strip(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(ThinSetSpec::symmetric_strip(-1.0), ValidationError);
  CHECK_THROWS_AS(ThinSetSpec::parse("disc:1"), ValidationError);
  CHECK_THROWS_AS(ThinSetSpec::parse("strip:1"), ValidationError);
}

TEST_CASE("parse") {
  const auto a = ThinSetSpec::parse("strip:0,3.141592653589793");
  REQUIRE(a.strip_bounds().has_value());
  CHECK(a.strip_bounds()->second == kPi);
  CHECK(a.contains(Complex(5.0, 1.0)));
  CHECK_FALSE(a.contains(Complex(5.0, -0.1)));
  const auto b = ThinSetSpec::parse("sym:1.5");
  CHECK(b.strip_bounds()->first == -1.5);
  CHECK(b.descriptor() == "sym:1.5");
  CHECK(b.contains_far_real());
  CHECK_FALSE(ThinSetSpec::horizontal_strip(1.0, 2.0).contains_far_real());
}

TEST_CASE("column counts") {
  const auto spec = ThinSetSpec::horizontal_strip(0.0, kPi);
  CHECK(spec.column_count(1.0, 7) == 1);
  CHECK(spec.column_count(1.0, -7) == 1);
  // Arg lambda = 1 puts the edge pi - 1 inside [0, pi]
  CHECK(spec.column_count(std::polar(1.0, 1.0), 3) == 2);
  const auto wide = ThinSetSpec::horizontal_strip(-10.0, 10.0);
  CHECK(wide.column_count(1.0, 0) == 5);  // P_{-2} .. P_2
  CHECK(spec.im_extent(100.0) == kPi);
}

TEST_CASE("property: height-pi strips meet one or two strips per column") {
  gen::Gen g(0x7415);
  for (int i = 0; i < 2000; ++i) {
    const Complex lambda = g.nonzero(-2.0, 2.0);
    const double a = g.uniform(-20.0, 20.0);
    const auto spec = ThinSetSpec::horizontal_strip(a, a + kPi);
    const auto n = spec.column_count(lambda, g.integer(-1000, 1000));
    CHECK(n >= 1);
    CHECK(n <= 2);
  }
}

TEST_CASE("property: members satisfy the cone condition") {
  gen::Gen g(0x7416);
  const auto band = ThinSetSpec::cone_band(
      3.0, [](double R) { return std::log(R + 2.0); }, "log-band", true);
  const auto strip = ThinSetSpec::horizontal_strip(-1.0, 2.0);
  for (int i = 0; i < 5000; ++i) {
    const Complex z = g.point(-1e3, 1e3, -5.0, 5.0);
    for (const auto* s : {&band, &strip}) {
      if (s->contains(z)) CHECK(std::abs(z) / (std::fabs(z.real()) + 1.0) < s->cone_constant());
    }
  }
}

}  // TEST_SUITE
