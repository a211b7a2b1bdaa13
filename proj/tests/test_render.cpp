#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "doctest.h"
#include "expdyn/dimension.hpp"
#include "expdyn/errors.hpp"
#include "expdyn/lambda_set.hpp"

using namespace expdyn;

namespace {

ExitDepthField two_by_two() {
  ExitDepthField f;
  f.window = Window{0.0, 0.0, 1.0, 1.0};
  f.nx = 2;
  f.ny = 2;
  f.depth = 3;
  f.conservative = {1, 2, 3, 4};  // (0,0) (1,0) (0,1) (1,1)
  f.optimistic = f.conservative;
  return f;
}

std::string render(const ExitDepthField& f, Palette p) {
  std::ostringstream out;
  render_field(f, p, out);
  return out.str();
}

}  // namespace

TEST_SUITE("render") {

TEST_CASE("gray 2x2 payload") {
  const std::string bytes = render(two_by_two(), Palette::kGray);
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(bytes.substr(0, header.size()) == header);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
  CHECK(p[0] == 0);
  CHECK(p[1] == 85);
  CHECK(p[2] == 170);
  CHECK(p[3] == 255);
}

TEST_CASE("color palettes write P6") {
  for (Palette p : {Palette::kFire, Palette::kOcean}) {
    const std::string bytes = render(two_by_two(), p);
    CHECK(bytes.rfind("P6\n2 2\n255\n", 0) == 0);
    CHECK(bytes.size() == std::string("P6\n2 2\n255\n").size() + 12);
  }
}

TEST_CASE("survivor mask keeps the real axis") {
  const auto field = sample_lambda_set(1.0, ThinSetSpec::horizontal_strip(0.0, kPi),
                                       Window{0.0, 0.0, 4.0, kPi}, 64, 32, 12);
  const std::string bytes = render(field, Palette::kMask);
  const std::string header = "P5\n64 32\n255\n";
  REQUIRE(bytes.size() == header.size() + 64 * 32);
  for (int ix = 0; ix < 64; ++ix) {
    CHECK(static_cast<unsigned char>(bytes[header.size() + static_cast<std::size_t>(ix)]) == 255);
  }
}

TEST_CASE("re-rendering is byte-identical") {
  const auto field = sample_lambda_set(1.0, ThinSetSpec::horizontal_strip(0.0, kPi),
                                       Window{-1.0, -1.0, 3.0, 4.0}, 40, 30, 6);
  for (Palette p : {Palette::kGray, Palette::kMask, Palette::kFire, Palette::kOcean}) {
    CHECK(render(field, p) == render(field, p));
  }
}

TEST_CASE("file output and errors") {
  const std::string path = "render_test_output.pgm";
  render_field(two_by_two(), Palette::kGray, path);
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(bytes == render(two_by_two(), Palette::kGray));
  std::remove(path.c_str());
  try {
    render_field(two_by_two(), Palette::kGray, std::string("/nonexistent-dir/x.pgm"));
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.pgm") != std::string::npos);
  }
  ExitDepthField empty;
  CHECK_THROWS_AS(render(empty, Palette::kGray), ValidationError);
}

TEST_CASE("palette names") {
  CHECK(parse_palette("gray") == Palette::kGray);
  CHECK(parse_palette("fire") == Palette::kFire);
  CHECK(std::string(to_string(Palette::kOcean)) == "ocean");
  CHECK_THROWS_AS(parse_palette("rainbow"), ValidationError);
}

}  // TEST_SUITE
