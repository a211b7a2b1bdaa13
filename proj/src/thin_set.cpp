#include "expdyn/thin_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "expdyn/errors.hpp"
#include "expdyn/symbolic.hpp"

namespace expdyn {
namespace {

constexpr int kProfileSamples = 64;

double parse_number(const std::string& s, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) {
    throw ValidationError("bad number '" + s + "' in " + context);
  }
  return v;
}

}  // namespace

ThinSetSpec ThinSetSpec::horizontal_strip(double a, double b) {
  if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("strip: need finite a <= b");
  }
  ThinSetSpec s;
  s.kind_ = Kind::kStrip;
  s.a_ = a;
  s.b_ = b;
  // |z| <= |Re z| + |Im z| < (1 + max|Im|)(|Re z| + 1)
  s.cone_ = 1.0 + std::max(std::fabs(a), std::fabs(b)) + 1e-9;
  const double w = b - a;
  s.width_ = [w](double) { return w; };
  std::ostringstream tag;
  tag.precision(17);
  tag << "strip:" << a << ',' << b;
  s.tag_ = tag.str();
  s.nondecreasing_ = true;
  return s;
}

ThinSetSpec ThinSetSpec::symmetric_strip(double half_height) {
  if (!(half_height >= 0.0)) throw ValidationError("symmetric strip: need P >= 0");
  ThinSetSpec s = horizontal_strip(-half_height, half_height);
  std::ostringstream tag;
  tag.precision(17);
  tag << "sym:" << half_height;
  s.tag_ = tag.str();
  return s;
}

ThinSetSpec ThinSetSpec::cone_band(double cone_constant, Profile width, std::string tag,
                                   bool nondecreasing) {
  if (!(cone_constant > 0.0) || !width) throw ValidationError("cone band: need K > 0 and a profile");
  ThinSetSpec s;
  s.kind_ = Kind::kBand;
  s.cone_ = cone_constant;
  s.width_ = std::move(width);
  s.tag_ = std::move(tag);
  s.nondecreasing_ = nondecreasing;
  return s;
}

ThinSetSpec ThinSetSpec::custom(Predicate membership, double cone_constant, Profile width,
                                std::string tag) {
  if (!membership || !width || !(cone_constant > 0.0)) {
    throw ValidationError("custom thin set: need predicate, K > 0 and a profile");
  }
  ThinSetSpec s;
  s.kind_ = Kind::kCustom;
  s.pred_ = std::move(membership);
  s.cone_ = cone_constant;
  s.width_ = std::move(width);
  s.tag_ = std::move(tag);
  return s;
}

ThinSetSpec ThinSetSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("set: expected KIND:ARGS, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  if (kind == "strip") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw ValidationError("set: strip needs A,B");
    return horizontal_strip(parse_number(args.substr(0, comma), text),
                            parse_number(args.substr(comma + 1), text));
  }
  if (kind == "sym") return symmetric_strip(parse_number(args, text));
  throw ValidationError("set: unknown kind '" + kind + "'");
}

bool ThinSetSpec::contains(Complex z) const {
  switch (kind_) {
    case Kind::kStrip:
      return a_ <= z.imag() && z.imag() <= b_;
    case Kind::kBand: {
      const double ar = std::fabs(z.real());
      if (!(std::abs(z) < cone_ * (ar + 1.0))) return false;
      const double w = width_(ar);
      return w >= 0.0 && std::fabs(z.imag()) <= 0.5 * w;
    }
    case Kind::kCustom:
      break;
  }
  return pred_(z);
}

double ThinSetSpec::width(double R) const { return width_(R); }

std::optional<std::pair<double, double>> ThinSetSpec::strip_bounds() const {
  if (kind_ != Kind::kStrip) return std::nullopt;
  return std::make_pair(a_, b_);
}

double ThinSetSpec::band_half_height(double abs_re_hi) const {
  // cone: |Im| < |z| < K(|Re| + 1)
  return cone_ * (abs_re_hi + 1.0);
}

double ThinSetSpec::im_extent(double abs_re) const {
  if (kind_ == Kind::kStrip) return std::max(std::fabs(a_), std::fabs(b_));
  double h = band_half_height(abs_re);
  if (kind_ == Kind::kBand && nondecreasing_) {
    const double w = width_(abs_re);
    h = w < 0.0 ? 0.0 : std::min(h, 0.5 * w);
  }
  return h;
}

std::int64_t ThinSetSpec::count_for_interval(Complex lambda, double lo, double hi) const {
  if (!(lo <= hi)) return 0;
  const double a = principal_arg(lambda);
  return strip_index_of_imag(a, hi) - strip_index_of_imag(a, lo) + 1;
}

std::int64_t ThinSetSpec::max_column_count(Complex lambda, double abs_lo, double abs_hi) const {
  if (kind_ == Kind::kStrip) return count_for_interval(lambda, a_, b_);
  const double cone_h = band_half_height(abs_hi);
  double wmax = -1.0;
  if (nondecreasing_) {
    wmax = width_(abs_hi);
  } else {
    const double lo = std::max(abs_lo, 0.0);
    for (int i = 0; i <= kProfileSamples; ++i) {
      const double f = static_cast<double>(i) / kProfileSamples;
      const double R = lo > 0.0 ? lo * std::pow(std::max(abs_hi, lo) / lo, f)
                                : lo + (abs_hi - lo) * f;
      wmax = std::max(wmax, width_(R));
    }
  }
  if (wmax < 0.0) return 0;
  if (kind_ == Kind::kBand) {
    const double h = std::min(cone_h, 0.5 * wmax);
    return count_for_interval(lambda, -h, h);
  }
  // Custom sets: a slice of diameter <= w inside the cone meets at most
  // ceil(w / 2pi) + 1 strips.
  const std::int64_t by_cone = count_for_interval(lambda, -cone_h, cone_h);
  const auto by_width = static_cast<std::int64_t>(std::ceil(wmax / kTwoPi)) + 1;
  return std::min(by_cone, by_width);
}

std::int64_t ThinSetSpec::column_count(Complex lambda, std::int64_t s) const {
  const double lo = s >= 0 ? static_cast<double>(s) : static_cast<double>(-(s + 1));
  const double hi = lo + 1.0;
  return max_column_count(lambda, lo, hi);
}

bool ThinSetSpec::contains_far_real() const {
  switch (kind_) {
    case Kind::kStrip:
      return a_ <= 0.0 && 0.0 <= b_;
    case Kind::kBand:
      return width_(1e300) >= 0.0;
    case Kind::kCustom:
      break;
  }
  return false;
}

ThinReport thin_check(const ThinSetSpec& spec, const std::vector<double>& radii,
                      int samples_per_slice) {
  if (samples_per_slice < 8) throw ValidationError("thin_check: need >= 8 samples per slice");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] >= 1.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw ValidationError("thin_check: radii must be increasing and >= 1");
    }
  }
  ThinReport report;
  const double K = spec.cone_constant();
  auto cone_sample = [&](Complex z) {
    const double ratio = std::abs(z) / (std::fabs(z.real()) + 1.0);
    report.worst_cone_ratio = std::max(report.worst_cone_ratio, ratio);
    if (!(ratio < K)) report.cone_ok = false;
  };
  std::vector<double> xs;
  std::vector<double> ys;
  for (double R : radii) {
    const double H = 1.5 * spec.im_extent(R) + 1.0;
    double widest = -1.0;
    for (double sign : {1.0, -1.0}) {
      double lo = 0.0;
      double hi = 0.0;
      bool any = false;
      for (int j = 0; j < samples_per_slice; ++j) {
        const double y = -H + 2.0 * H * j / (samples_per_slice - 1);
        const Complex z(sign * R, y);
        if (!spec.contains(z)) continue;
        cone_sample(z);
        lo = any ? std::min(lo, y) : y;
        hi = any ? std::max(hi, y) : y;
        any = true;
      }
      if (any) widest = std::max(widest, hi - lo);
    }
    // Circles catch sets that escape the cone away from the slices.
    const int n = ((samples_per_slice + 3) / 4) * 4;
    for (int j = 0; j < n; ++j) {
      const Complex z = std::polar(R, kTwoPi * j / n);
      if (spec.contains(z)) cone_sample(z);
    }
    report.radii.push_back(R);
    report.measured_widths.push_back(widest);
    if (widest < 0.0) {
      report.empty_slices.push_back(R);
      continue;
    }
    if (widest > spec.width(R) * (1.0 + 1e-9) + 1e-12) report.width_ok = false;
    xs.push_back(std::log(R));
    ys.push_back(std::max(0.0, std::log(std::max(widest, 1e-300))));
  }
  if (xs.size() >= 2) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    report.thinness_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  report.thin = report.cone_ok && report.width_ok && report.thinness_exponent <= kThinExponentLimit;
  return report;
}

}  // namespace expdyn
