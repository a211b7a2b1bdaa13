#include <cmath>
#include <limits>

#include "doctest.h"
#include "expdyn/errors.hpp"
#include "expdyn/tower.hpp"
#include "gen.hpp"

using expdyn::TowerReal;

TEST_SUITE("tower") {

TEST_CASE("small values stay at level zero") {
  const TowerReal t(5.0);
  CHECK(t.level() == 0);
  CHECK(t.mantissa() == 5.0);
  CHECK(t.is_native());
  CHECK(TowerReal(-3.0).level() == 0);
  CHECK(TowerReal(709.9).level() == 0);
}

TEST_CASE("values at the lift move up one level") {
  const TowerReal t(800.0);
  CHECK(t.level() == 1);
  CHECK(t.mantissa() == doctest::Approx(std::log(800.0)).epsilon(1e-15));
  CHECK(t.to_double() == doctest::Approx(800.0).epsilon(1e-13));
}

TEST_CASE("exp lifts and log lowers") {
  const TowerReal big = TowerReal::exp_of(1000.0);
  CHECK(big.level() == 2);
  CHECK(big.mantissa() == doctest::Approx(std::log(1000.0)));
  CHECK(big.to_double() == std::numeric_limits<double>::infinity());
  const TowerReal back = big.log();
  CHECK(back.level() == 1);
  CHECK(back.to_double() == doctest::Approx(1000.0).epsilon(1e-13));
  CHECK(TowerReal(2.0).exp().to_double() == doctest::Approx(std::exp(2.0)));
  CHECK(TowerReal(1.0).log().to_double() == 0.0);
}

TEST_CASE("non-finite and non-positive inputs are rejected") {
  CHECK_THROWS_AS(TowerReal(std::nan("")), expdyn::RangeError);
  CHECK_THROWS_AS(TowerReal(std::numeric_limits<double>::infinity()), expdyn::RangeError);
  CHECK_THROWS_AS(TowerReal(0.0).log(), expdyn::DomainError);
  CHECK_THROWS_AS(TowerReal(-1.0).log(), expdyn::DomainError);
  CHECK_THROWS_AS(TowerReal(2.0).times(0.0), expdyn::ValidationError);
}

TEST_CASE("plus and times at level one") {
  const TowerReal t = TowerReal::exp_of(100.0);
  CHECK(t.level() == 1);
  const TowerReal p = t.plus(1.0);
  CHECK(p.level() == 1);
  CHECK(p.mantissa() == doctest::Approx(100.0).epsilon(1e-15));
  const TowerReal q = t.times(std::exp(5.0));
  CHECK(q.mantissa() == doctest::Approx(105.0).epsilon(1e-14));
  // e^800 is stored as exp^2(log 800)
  CHECK(TowerReal::exp_of(800.0).level() == 2);
  CHECK(TowerReal(3.0).times(2.0).to_double() == 6.0);
}

TEST_CASE("to_string") {
  CHECK(TowerReal(1.5).to_string() == "1.5");
  CHECK(TowerReal::exp_of(100.0).to_string().rfind("exp^1(", 0) == 0);
}

TEST_CASE("property: order agrees with the doubles and exp preserves it") {
  gen::Gen g(0x70e11);
  for (int i = 0; i < 2000; ++i) {
    const double a = g.uniform(-50.0, 2000.0);
    const double b = g.uniform(-50.0, 2000.0);
    const TowerReal ta(a), tb(b);
    CHECK((ta < tb) == (a < b));
    const TowerReal ea = ta.exp(), eb = tb.exp();
    CHECK(ea.level() >= ta.level());
    if (a < b) CHECK(ea < eb);
    if (b < a) CHECK(eb < ea);
    if (ta.level() >= 1 || a >= std::log(TowerReal::kLift)) CHECK(ea.level() == ta.level() + 1);
  }
}

TEST_CASE("property: log inverts exp") {
  gen::Gen g(0x70e12);
  for (int i = 0; i < 1000; ++i) {
    const double a = g.uniform(-20.0, 5000.0);
    const TowerReal back = TowerReal(a).exp().log();
    CHECK(back.to_double() == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("property: canonical form") {
  gen::Gen g(0x70e13);
  for (int i = 0; i < 1000; ++i) {
    const int level = static_cast<int>(g.integer(0, 4));
    const TowerReal t = TowerReal::from_parts(level, g.uniform(0.5, 5000.0));
    if (t.level() == 0) {
      CHECK(t.mantissa() < TowerReal::kLift);
    } else {
      CHECK(t.mantissa() >= std::log(TowerReal::kLift));
      CHECK(t.mantissa() < TowerReal::kLift);
    }
  }
}

}  // TEST_SUITE
