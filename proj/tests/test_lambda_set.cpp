#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "expdyn/errors.hpp"
#include "expdyn/lambda_set.hpp"
#include "gen.hpp"

using namespace expdyn;

namespace {

const ThinSetSpec kStrip = ThinSetSpec::horizontal_strip(0.0, kPi);

// First j < n with Im f^j(z) outside [0, pi], by plain complex iteration.
int brute_force_code(Complex z, int n) {
  for (int j = 0; j < n; ++j) {
    if (!(z.imag() >= 0.0 && z.imag() <= kPi)) return j + 1;
    z = std::exp(z);
  }
  return n + 1;
}

Complex exp_fixed_point() {
  Complex z(0.3, 1.3);
  for (int i = 0; i < 100; ++i) z -= (std::exp(z) - z) / (std::exp(z) - 1.0);
  return z;
}

}  // namespace

TEST_SUITE("lambda_set") {

TEST_CASE("membership examples") {
  const auto a = lambda_membership(1.0, kStrip, 0.5, 100);
  CHECK(a.status == MembershipStatus::kMember);
  CHECK(a.depth == 100);
  CHECK(a.conservative_code == 101);

  const auto b = lambda_membership(1.0, kStrip, Complex(0.5, 3.0), 10);
  REQUIRE(b.status == MembershipStatus::kExit);
  REQUIRE(b.exit_index.has_value());
  CHECK(*b.exit_index == 5);
  CHECK(*b.exit_index == brute_force_code(Complex(0.5, 3.0), 10) - 1);
  REQUIRE(b.exit_point.has_value());
  CHECK(b.exit_point->imag() == doctest::Approx(5.14).epsilon(0.01));
  CHECK(b.exit_point->imag() > kPi);
  CHECK(b.conservative_code == 6);

  const auto c = lambda_membership(1.0, kStrip, Complex(0.0, kPi), 50);
  CHECK(c.status == MembershipStatus::kMember);
  CHECK(c.depth == 50);
  CHECK_THROWS_AS(lambda_membership(1.0, kStrip, 0.5, 0), ValidationError);
}

TEST_CASE("the exit iterate of 0.5 + 3i matches direct iteration") {
  Complex z(0.5, 3.0);
  for (int j = 0; j < 5; ++j) z = std::exp(z);
  const auto r = lambda_membership(1.0, kStrip, Complex(0.5, 3.0), 10);
  REQUIRE(r.exit_point.has_value());
  CHECK(std::abs(*r.exit_point - z) < 1e-9 * std::abs(z));
}

TEST_CASE("field agrees with the brute-force definition") {
  const Window w{0.0, 0.0, 3.0, kPi};
  const auto field = sample_lambda_set(1.0, kStrip, w, 64, 64, 3);
  int mismatches = 0;
  for (int iy = 0; iy < 64; ++iy) {
    for (int ix = 0; ix < 64; ++ix) {
      if (field.at(ix, iy) != brute_force_code(field.pixel(ix, iy), 3)) ++mismatches;
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("field equals per-pixel membership") {
  for (const Complex lambda : {Complex(1.0, 0.0), Complex(0.7, 0.4)}) {
    const Window w{-2.0, -1.0, 6.0, 4.0};
    const auto field = sample_lambda_set(lambda, kStrip, w, 64, 64, 8);
    for (int iy = 0; iy < 64; ++iy) {
      for (int ix = 0; ix < 64; ++ix) {
        const auto m = lambda_membership(lambda, kStrip, field.pixel(ix, iy), 8);
        const std::size_t i = static_cast<std::size_t>(iy) * 64 + static_cast<std::size_t>(ix);
        CHECK(field.conservative[i] == m.conservative_code);
        CHECK(field.optimistic[i] == m.optimistic_code);
      }
    }
  }
}

TEST_CASE("the real segment survives") {
  const Window w{1.0, 0.0, 2.0, 1.0};
  for (int depth : {1, 5, 20, 60}) {
    const auto field = sample_lambda_set(1.0, kStrip, w, 33, 9, depth);
    for (int ix = 0; ix < 33; ++ix) CHECK(field.survivor(ix, 0));
  }
}

TEST_CASE("survivors shrink with depth") {
  const Window w{0.0, 0.0, 4.0, kPi};
  auto prev = sample_lambda_set(1.0, kStrip, w, 96, 96, 1);
  for (int depth = 2; depth <= 8; ++depth) {
    const auto next = sample_lambda_set(1.0, kStrip, w, 96, 96, depth);
    for (int iy = 0; iy < 96; ++iy) {
      for (int ix = 0; ix < 96; ++ix) {
        if (next.survivor(ix, iy)) CHECK(prev.survivor(ix, iy));
      }
    }
    prev = next;
  }
}

TEST_CASE("non-strip sets use the generic path") {
  const auto band = ThinSetSpec::cone_band(
      5.0, [](double) { return 2.0 * kPi; }, "band", true);
  CHECK(lambda_membership(1.0, band, 0.5, 40).status == MembershipStatus::kMember);
  const auto r = lambda_membership(1.0, band, Complex(0.5, 3.0), 10);
  CHECK(r.status == MembershipStatus::kExit);
  const auto field = sample_lambda_set(1.0, band, Window{0.0, -1.0, 2.0, 1.0}, 16, 16, 5);
  for (int iy = 0; iy < 16; ++iy) {
    for (int ix = 0; ix < 16; ++ix) {
      CHECK(field.at(ix, iy) == lambda_membership(1.0, band, field.pixel(ix, iy), 5).conservative_code);
    }
  }
}

TEST_CASE("field validation") {
  CHECK_THROWS_AS(sample_lambda_set(1.0, kStrip, Window{0, 0, 1, 1}, 1, 4, 3), ValidationError);
  CHECK_THROWS_AS(sample_lambda_set(1.0, kStrip, Window{0, 0, 0, 1}, 4, 4, 3), ValidationError);
  CHECK_THROWS_AS(sample_lambda_set(1.0, kStrip, Window{0, 0, 1, 1}, 4, 4, 0), ValidationError);
}

TEST_CASE("field exports") {
  const auto field = sample_lambda_set(1.0, kStrip, Window{0.0, 0.0, 1.0, 4.0}, 3, 2, 4);
  std::ostringstream csv;
  write_field_csv(field, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("ix,iy,re,im,exit_depth\n0,0,0,0,5\n1,0,0.5,0,5\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);

  std::ostringstream pgm;
  write_field_pgm16(field, pgm);
  const std::string bytes = pgm.str();
  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 12);
  CHECK(bytes.substr(0, header.size()) == header);
  // first stored pixel is (0,0) = 5, big-endian
  CHECK(static_cast<unsigned char>(bytes[header.size()]) == 0);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 5);
  // top row Im = 4 exits at once
  CHECK(static_cast<unsigned char>(bytes[header.size() + 7]) == 1);
  CHECK_THROWS_AS(write_field_csv(field, std::string("/nonexistent-dir/f.csv")), IoError);
}

TEST_CASE("worker count does not change the field") {
  const Window w{-1.0, -1.0, 5.0, 4.0};
  SampleOptions one;
  one.workers = 1;
  SampleOptions three;
  three.workers = 3;
  for (const Complex lambda : {Complex(1.0, 0.0), Complex(0.5, 0.5)}) {
    const auto a = sample_lambda_set(lambda, kStrip, w, 50, 37, 6, one);
    const auto b = sample_lambda_set(lambda, kStrip, w, 50, 37, 6, three);
    CHECK(a.conservative == b.conservative);
    CHECK(a.optimistic == b.optimistic);
  }
}

TEST_CASE("property: membership truncation nests") {
  gen::Gen g(0x1a3d);
  for (int i = 0; i < 500; ++i) {
    const Complex z = g.point(-3.0, 8.0, -0.5, 3.5);
    const int n2 = static_cast<int>(g.integer(2, 30));
    const int n1 = static_cast<int>(g.integer(1, n2 - 1));
    const auto deep = lambda_membership(1.0, kStrip, z, n2);
    const auto shallow = lambda_membership(1.0, kStrip, z, n1);
    if (deep.status == MembershipStatus::kMember) CHECK(shallow.status == MembershipStatus::kMember);
    if (deep.status == MembershipStatus::kExit && *deep.exit_index < n1) {
      CHECK(shallow.status == MembershipStatus::kExit);
      CHECK(*shallow.exit_index == *deep.exit_index);
    }
  }
}

TEST_CASE("property: forward invariance at depth") {
  gen::Gen g(0x1a3e);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const Complex z = g.point(-3.0, 5.0, 0.0, kPi);
    const int n = static_cast<int>(g.integer(2, 12));
    const auto m = lambda_membership(1.0, kStrip, z, n);
    if (m.status != MembershipStatus::kMember || m.precision_caveat || m.snapped_to_real) continue;
    const Complex fz = std::exp(z);
    if (!std::isfinite(std::abs(fz))) continue;
    CHECK(lambda_membership(1.0, kStrip, fz, n - 1).status == MembershipStatus::kMember);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("property: the nonnegative real axis is in every approximant") {
  gen::Gen g(0x1a3f);
  for (int i = 0; i < 500; ++i) {
    const double x = g.uniform(0.0, 100.0);
    const int n = static_cast<int>(g.integer(1, 80));
    CHECK(lambda_membership(1.0, kStrip, x, n).status == MembershipStatus::kMember);
  }
}

TEST_CASE("classify_trajectory examples") {
  const auto a = classify_trajectory(0.2, 0.0, 100, 1.0);
  CHECK(a.kind == TrajectoryKind::kBounded);
  CHECK(a.max_modulus == doctest::Approx(0.259171101819073764).epsilon(1e-6));
  const auto b = classify_trajectory(1.0, 1.0, 20);
  CHECK(b.kind == TrajectoryKind::kEscaping);
  CHECK(b.evidence == 5);  // log|z_4| ~ 3.8e6 < 1e8 < log|z_5|
  const Complex zs = exp_fixed_point();
  CHECK(std::abs(std::exp(zs) - zs) < 1e-12);
  const auto c = classify_trajectory(1.0, zs, 40);
  CHECK(c.kind == TrajectoryKind::kBounded);
  const auto d = classify_trajectory(1.0, -1000.0, 3, 0.5);
  CHECK(d.kind == TrajectoryKind::kUndecided);
  CHECK_THROWS_AS(classify_trajectory(1.0, 0.0, 5, -1.0), ValidationError);
  CHECK(std::string(to_string(TrajectoryKind::kEscaping)) == "escaping");
}

TEST_CASE("measure_expansion examples") {
  const auto a = measure_expansion(0.2, 1.0, {Complex(0.259171101819073764, 0.0)}, 5);
  REQUIRE(a.has_samples);
  CHECK(a.gamma < 1.0);
  CHECK(a.gamma == doctest::Approx(0.259171101819073764).epsilon(1e-6));

  const Complex zs = exp_fixed_point();
  const auto b = measure_expansion(1.0, 2.0, {zs}, 10);
  REQUIRE(b.has_samples);
  CHECK(b.gamma == doctest::Approx(std::abs(zs)).epsilon(1e-6));
  CHECK(b.gamma == doctest::Approx(1.374557010743707).epsilon(1e-6));
  CHECK(b.gamma > 1.0);

  const auto c = measure_expansion(1.0, 2.0, {}, 5);
  CHECK_FALSE(c.has_samples);
  CHECK(c.note == "no surviving samples");
  // a sample that leaves the disc does not count
  const auto d = measure_expansion(1.0, 2.0, {Complex(3.0, 0.0)}, 5);
  CHECK_FALSE(d.has_samples);
}

}  // TEST_SUITE
