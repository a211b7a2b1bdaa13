#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "expdyn/core_dynamics.hpp"
#include "expdyn/errors.hpp"
#include "expdyn/symbolic.hpp"
#include "gen.hpp"

using namespace expdyn;

namespace {

// Newton on x = lambda e^x started at x0.
double real_fixed_point(double lambda, double x0) {
  double x = x0;
  for (int i = 0; i < 100; ++i) {
    const double g = lambda * std::exp(x) - x;
    const double dg = lambda * std::exp(x) - 1.0;
    x -= g / dg;
  }
  return x;
}

// Newton on e^z = z from a start near the first upper fixed point.
Complex exp_fixed_point() {
  Complex z(0.3, 1.3);
  for (int i = 0; i < 100; ++i) z -= (std::exp(z) - z) / (std::exp(z) - 1.0);
  return z;
}

Complex direct_iterate(Complex lambda, Complex z, int n) {
  for (int i = 0; i < n; ++i) z = lambda * std::exp(z);
  return z;
}

// |(f^n)'(z)| by central differences.
double fd_derivative(Complex lambda, Complex z, int n, double h) {
  const Complex a = direct_iterate(lambda, z + h, n);
  const Complex b = direct_iterate(lambda, z - h, n);
  return std::abs(a - b) / (2.0 * h);
}

}  // namespace

TEST_SUITE("core_dynamics") {

TEST_CASE("oracles agree with their frozen values") {
  CHECK(real_fixed_point(0.2, 0.0) == doctest::Approx(0.259171101819073764).epsilon(1e-15));
  CHECK(real_fixed_point(0.2, 3.0) == doctest::Approx(2.54264135777352633).epsilon(1e-15));
  const Complex z = exp_fixed_point();
  CHECK(z.real() == doctest::Approx(0.318131505204764135).epsilon(1e-14));
  CHECK(z.imag() == doctest::Approx(1.337235701430689409).epsilon(1e-14));
}

TEST_CASE("eval_map examples") {
  const Complex a = eval_map(1.0, 0.0);
  CHECK(a.real() == 1.0);
  CHECK(a.imag() == 0.0);
  const Complex b = eval_map(1.0, Complex(1.0, kPi));
  CHECK(b.real() == doctest::Approx(-2.718281828459045).epsilon(1e-15));
  CHECK(std::abs(b.imag()) < 1e-15);
  const double x = 0.259171101819073764;
  CHECK(std::abs(eval_map(0.2, x).real() - x) < 1e-6);
  CHECK_THROWS_AS(eval_map(1.0, Complex(720.0, 0.0)), RangeError);
}

TEST_CASE("iterate_orbit: tower moduli for lambda = 1") {
  const Orbit o = iterate_orbit(1.0, 0.0, 4);
  REQUIRE(o.points.size() == 5);
  const double expected[5] = {0.0, 1.0, std::exp(1.0), std::exp(std::exp(1.0)),
                              std::exp(std::exp(std::exp(1.0)))};
  CHECK(o.points[0].polar.is_zero());
  for (int n = 1; n < 5; ++n) {
    REQUIRE(o.points[n].native);
    CHECK(std::abs(o.points[n].z) == doctest::Approx(expected[n]).epsilon(1e-13));
  }
  CHECK(std::abs(o.points[4].z) == doctest::Approx(3.8143e6).epsilon(1e-4));
  CHECK_FALSE(o.escape_index.has_value());
}

TEST_CASE("iterate_orbit: i pi falls onto the real axis") {
  const Orbit o = iterate_orbit(1.0, Complex(0.0, kPi), 4);
  CHECK(o.points[1].z.real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(o.points[1].z.imag()) < 1e-15);
  CHECK(o.points[2].z.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  for (std::size_t n = 2; n < o.points.size(); ++n) CHECK(o.points[n].z.imag() == 0.0);
}

TEST_CASE("iterate_orbit: attracting fixed point and escape flag") {
  const Orbit o = iterate_orbit(0.2, 0.0, 50);
  CHECK(std::abs(o.points.back().z.real() - 0.259171101819073764) < 1e-6);
  CHECK_FALSE(o.escape_index.has_value());
  CHECK_FALSE(o.precision_lost);

  const Orbit e = iterate_orbit(1.0, 1.0, 8, 100.0);
  REQUIRE(e.escape_index.has_value());
  // 1, e, e^e, e^{e^e} ~ 3.8e6, then log|z_4| ~ 3.8e6 > 100
  CHECK(*e.escape_index == 4);
  CHECK(e.precision_lost);
  CHECK_THROWS_AS(iterate_orbit(1.0, 0.0, -1), ValidationError);
}

TEST_CASE("orbit_derivative_log examples") {
  CHECK(orbit_derivative_log(1.0, 0.0, 1) == 0.0);
  CHECK(orbit_derivative_log(1.0, 0.0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(orbit_derivative_log(1.0, 0.0, 6), RangeError);
}

TEST_CASE("property: orbit_derivative_log matches central differences") {
  gen::Gen g(0xd311);
  for (int i = 0; i < 200; ++i) {
    const Complex lambda = g.point(-1.5, 1.5, -1.5, 1.5);
    if (std::abs(lambda) < 0.3) continue;
    const Complex z = g.point(-1.0, 1.0, -1.0, 1.0);
    const int n = static_cast<int>(g.integer(1, 5));
    const Complex end = direct_iterate(lambda, z, n);
    if (!(std::abs(end) < 1e6)) continue;
    const double fd = fd_derivative(lambda, z, n, 1e-6);
    const double exact = std::exp(orbit_derivative_log(lambda, z, n));
    // central differences resolve derivatives down to about eps |f^n| / h
    if (exact < 1e-4 * std::max(1.0, std::abs(end))) continue;
    CHECK(std::abs(exact - fd) <= 1e-5 * exact);
  }
}

TEST_CASE("inverse_branch examples") {
  const Complex e = std::exp(1.0);
  const Complex a = inverse_branch(1.0, e, 0);
  CHECK(a.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.imag() == 0.0);
  const Complex b = inverse_branch(1.0, -e, 0);
  CHECK(b.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.imag() == doctest::Approx(kPi).epsilon(1e-15));
  const Complex c = inverse_branch(1.0, -e, -1);
  CHECK(c.imag() == doctest::Approx(-kPi).epsilon(1e-15));
  CHECK(strip_index(1.0, b) == 0);
  CHECK(strip_index(1.0, c) == -1);
  CHECK_THROWS_AS(inverse_branch(1.0, 0.0, 0), DomainError);
}

TEST_CASE("property: inverse_branch round trip lands in strip k") {
  gen::Gen g(0x1b7a);
  for (int i = 0; i < 3000; ++i) {
    const Complex lambda = g.nonzero(-2.0, 2.0);
    const Complex w = g.nonzero(-20.0, 20.0);
    const auto k = g.integer(-6, 6);
    const Complex z = inverse_branch(lambda, w, k);
    CHECK(std::abs(lambda * std::exp(z) - w) <= 1e-12 * std::abs(w));
    CHECK(strip_index(lambda, z) == k);
  }
}

TEST_CASE("singular_orbit examples") {
  const auto b = singular_orbit(1.0, 5);
  REQUIRE(b.size() == 5);
  CHECK(b[2].real_part().to_native().value() == doctest::Approx(15.15426224147926).epsilon(1e-13));
  const TowerReal lm5 = b[4].polar.log_modulus;
  CHECK(lm5.level() == 1);
  CHECK(lm5.to_double() == doctest::Approx(3814279.1047602).epsilon(1e-12));
  CHECK(b[4].exact_real);

  const auto small = singular_orbit(0.2, 50);
  for (const auto& p : small) CHECK(p.polar.log_modulus.level() == 0);
  CHECK(std::abs(small.back().z.real() - 0.259171101819073764) < 1e-6);
}

TEST_CASE("property: log-polar iteration agrees with direct iteration") {
  gen::Gen g(0x10970);
  for (int i = 0; i < 300; ++i) {
    const Complex lambda = g.nonzero(-1.0, 1.0);
    const Complex z0 = g.point(-1.0, 1.0, -1.0, 1.0);
    const Orbit o = iterate_orbit(lambda, z0, 5);
    Complex z = z0;
    for (int n = 1; n <= 5; ++n) {
      z = lambda * std::exp(z);
      if (!(std::abs(z) < 50.0) || std::abs(z) < 1e-6) break;
      const auto& p = o.points[static_cast<std::size_t>(n)];
      CHECK(p.polar.log_modulus.to_double() == doctest::Approx(std::log(std::abs(z))).epsilon(1e-9));
      const double darg = std::abs(wrap_angle(p.polar.argument - std::arg(z)));
      CHECK(darg < 1e-9);
    }
    // singular orbit recursion against direct iteration
    const auto beta = singular_orbit(lambda, 3);
    Complex w = 0.0;
    for (int n = 0; n < 3; ++n) {
      w = lambda * std::exp(w);
      if (!(std::abs(w) < 50.0)) break;
      const auto& p = beta[static_cast<std::size_t>(n)];
      CHECK(p.polar.log_modulus.to_double() == doctest::Approx(std::log(std::abs(w))).epsilon(1e-9));
      CHECK(std::abs(wrap_angle(p.polar.argument - std::arg(w))) < 1e-9);
    }
  }
}

TEST_CASE("check_supergrowth: lambda = 1 ratios are exactly 1") {
  const auto rep = check_supergrowth(1.0, 1.0, 15);
  CHECK(rep.holds);
  CHECK_FALSE(rep.first_failure_index.has_value());
  REQUIRE_FALSE(rep.ratios.empty());
  for (double r : rep.ratios) CHECK(std::abs(r - 1.0) < 1e-12);
}

TEST_CASE("check_supergrowth: attracting regime fails") {
  const auto a = check_supergrowth(0.2, 1.0, 20);
  CHECK_FALSE(a.holds);
  REQUIRE(a.first_failure_index.has_value());
  CHECK(*a.first_failure_index == 1);
  // alpha_{n+1} / e^{alpha_n} = 0.2 >= c here, but the orbit never escapes
  const auto b = check_supergrowth(0.2, 0.1, 20);
  CHECK_FALSE(b.holds);
  CHECK_FALSE(b.failure_reason.empty());
}

TEST_CASE("check_supergrowth: lambda = 10 ratios equal 10") {
  const auto rep = check_supergrowth(10.0, 1.0, 15);
  CHECK(rep.holds);
  REQUIRE_FALSE(rep.ratios.empty());
  // alpha_2 ~ 2.2e5 carries ulp error into the exponent, hence 1e-9
  for (double r : rep.ratios) CHECK(r == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("check_supergrowth: validation") {
  CHECK_THROWS_AS(check_supergrowth(1.0, 0.0, 15), ValidationError);
  CHECK_THROWS_AS(check_supergrowth(1.0, 1.0, 1), ValidationError);
}

TEST_CASE("property: supergrowth is monotone in c") {
  gen::Gen g(0x5e9);
  for (int i = 0; i < 200; ++i) {
    const double lambda = g.uniform(0.3, 4.0);
    const double c = g.uniform(0.05, 3.0);
    const double c2 = c * g.uniform(0.05, 1.0);
    const auto a = check_supergrowth(lambda, c, 12);
    const auto b = check_supergrowth(lambda, c2, 12);
    if (a.holds) CHECK(b.holds);
  }
}

}  // TEST_SUITE
