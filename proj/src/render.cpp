#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <vector>

#include "expdyn/dimension.hpp"
#include "expdyn/errors.hpp"

namespace expdyn {
namespace {

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::array<unsigned char, 3> ramp(Palette p, double t) {
  switch (p) {
    case Palette::kFire:
      return {to_byte(3.0 * t), to_byte(3.0 * t - 1.0), to_byte(3.0 * t - 2.0)};
    case Palette::kOcean:
      return {to_byte(t * t), to_byte(t), to_byte(0.5 + 0.5 * t)};
    default:
      break;
  }
  const unsigned char g = to_byte(t);
  return {g, g, g};
}

}  // namespace

Palette parse_palette(const std::string& name) {
  if (name == "gray") return Palette::kGray;
  if (name == "mask") return Palette::kMask;
  if (name == "fire") return Palette::kFire;
  if (name == "ocean") return Palette::kOcean;
  throw ValidationError("unknown palette '" + name + "' (gray, mask, fire, ocean)");
}

const char* to_string(Palette p) {
  switch (p) {
    case Palette::kGray:
      return "gray";
    case Palette::kMask:
      return "mask";
    case Palette::kFire:
      return "fire";
    case Palette::kOcean:
      return "ocean";
  }
  return "gray";
}

void render_field(const ExitDepthField& field, Palette palette, std::ostream& out) {
  if (field.nx < 1 || field.ny < 1 || field.depth < 1 ||
      field.conservative.size() != static_cast<std::size_t>(field.nx) * static_cast<std::size_t>(field.ny)) {
    throw ValidationError("render_field: empty or inconsistent field");
  }
  const bool gray = palette == Palette::kGray || palette == Palette::kMask;
  out << (gray ? "P5\n" : "P6\n") << field.nx << ' ' << field.ny << "\n255\n";
  const std::size_t channels = gray ? 1 : 3;
  std::vector<unsigned char> row(static_cast<std::size_t>(field.nx) * channels);
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      const std::int32_t code = field.at(ix, iy);
      const double t = palette == Palette::kMask
                           ? (code == field.depth + 1 ? 1.0 : 0.0)
                           : static_cast<double>(code - 1) / static_cast<double>(field.depth);
      const auto px = ramp(palette, t);
      for (std::size_t c = 0; c < channels; ++c) {
        row[static_cast<std::size_t>(ix) * channels + c] = px[c];
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

void render_field(const ExitDepthField& field, Palette palette, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  render_field(field, palette, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace expdyn
