#pragma once

#include <compare>
#include <string>

namespace expdyn {

// Iterated-exponential real: value = exp^level(mantissa).
//
// Canonical form: level 0 holds every value below kLift (negatives included).
// For level >= 1 the mantissa lies in [log(kLift), kLift), so levels order
// values and equal levels compare by mantissa.
class TowerReal {
 public:
  static constexpr double kLift = 710.0;

  constexpr TowerReal() = default;
  explicit TowerReal(double value);

  static TowerReal from_parts(int level, double mantissa);
  // e^x without materializing it.
  static TowerReal exp_of(double x);

  int level() const noexcept { return level_; }
  double mantissa() const noexcept { return mantissa_; }
  bool is_native() const noexcept { return level_ == 0; }
  // Finite double when the value fits, +inf otherwise.
  double to_double() const;

  TowerReal exp() const;
  // Requires a positive value.
  TowerReal log() const;
  // this + a; the result must stay positive when this is at level >= 1.
  TowerReal plus(double a) const;
  // this * c for c > 0.
  TowerReal times(double c) const;

  std::string to_string() const;

  friend bool operator==(const TowerReal& a, const TowerReal& b) {
    return a.level_ == b.level_ && a.mantissa_ == b.mantissa_;
  }
  friend std::partial_ordering operator<=>(const TowerReal& a, const TowerReal& b) {
    if (a.level_ != b.level_) return a.level_ <=> b.level_;
    return a.mantissa_ <=> b.mantissa_;
  }

 private:
  void normalize();

  int level_ = 0;
  double mantissa_ = 0.0;
};

}  // namespace expdyn
