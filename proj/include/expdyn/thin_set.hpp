#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expdyn/core_dynamics.hpp"

namespace expdyn {

// A closed set W in a cone around the real axis, with an upper bound w(R) on
// the diameter of its vertical slices at Re = +-R.
class ThinSetSpec {
 public:
  using Predicate = std::function<bool(Complex)>;
  using Profile = std::function<double(double)>;  // negative means "empty slice"

  // {a <= Im z <= b}
  static ThinSetSpec horizontal_strip(double a, double b);
  // {|Im z| <= half_height}
  static ThinSetSpec symmetric_strip(double half_height);
  // {|Im z| <= w(|Re z|)/2} inside the cone |z| < K(|Re z| + 1). The profile is
  // sampled when bounding column counts unless declared nondecreasing.
  static ThinSetSpec cone_band(double cone_constant, Profile width, std::string tag = "cone-band",
                               bool nondecreasing = false);
  // Arbitrary closed set; K and w must be valid bounds for it.
  static ThinSetSpec custom(Predicate membership, double cone_constant, Profile width,
                            std::string tag);
  // "strip:A,B" or "sym:P"
  static ThinSetSpec parse(const std::string& text);

  bool contains(Complex z) const;
  double cone_constant() const { return cone_; }
  double width(double R) const;
  const std::string& descriptor() const { return tag_; }
  std::optional<std::pair<double, double>> strip_bounds() const;

  // Bound on |Im z| over points of W with |Re z| <= abs_re.
  double im_extent(double abs_re) const;
  // Bound on the number of strips P_k that meet W in column s
  // ({s <= Re z < s + 1}); 0 when W misses the column.
  std::int64_t column_count(Complex lambda, std::int64_t s) const;
  // Bound on column_count over columns with |Re| in [abs_lo, abs_hi].
  std::int64_t max_column_count(Complex lambda, double abs_lo, double abs_hi) const;
  // Membership for a point whose real part is +-infinity-scale and Im = 0.
  bool contains_far_real() const;

 private:
  enum class Kind { kStrip, kBand, kCustom };

  std::int64_t count_for_interval(Complex lambda, double lo, double hi) const;
  double band_half_height(double abs_re_hi) const;

  Kind kind_ = Kind::kStrip;
  double a_ = 0.0;
  double b_ = 0.0;
  double cone_ = 1.0;
  Profile width_;
  Predicate pred_;
  std::string tag_;
  bool nondecreasing_ = false;
};

struct ThinReport {
  bool cone_ok = true;
  bool width_ok = true;
  double thinness_exponent = 0.0;
  bool thin = false;  // cone_ok && width_ok && exponent <= kThinExponentLimit
  std::vector<double> radii;
  std::vector<double> measured_widths;   // max over the slices Re = +R and Re = -R
  std::vector<double> empty_slices;      // warnings: R with no member samples
  double worst_cone_ratio = 0.0;
};

inline constexpr double kThinExponentLimit = 0.1;

// Samples slices Re = +-R and circles |z| = R.
ThinReport thin_check(const ThinSetSpec& spec, const std::vector<double>& radii,
                      int samples_per_slice);

}  // namespace expdyn
