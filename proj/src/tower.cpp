#include "expdyn/tower.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "expdyn/errors.hpp"

namespace expdyn {
namespace {

const double kLogLift = std::log(TowerReal::kLift);

}  // namespace

TowerReal::TowerReal(double value) : level_(0), mantissa_(value) {
  if (std::isnan(value) || value == std::numeric_limits<double>::infinity()) {
    throw RangeError("TowerReal: non-finite value");
  }
  normalize();
}

TowerReal TowerReal::from_parts(int level, double mantissa) {
  if (level < 0 || std::isnan(mantissa)) throw ValidationError("TowerReal: bad parts");
  TowerReal t;
  t.level_ = level;
  t.mantissa_ = mantissa;
  t.normalize();
  return t;
}

TowerReal TowerReal::exp_of(double x) { return TowerReal(x).exp(); }

void TowerReal::normalize() {
  while (mantissa_ >= kLift) {
    mantissa_ = std::log(mantissa_);
    ++level_;
  }
  while (level_ >= 1 && mantissa_ < kLogLift) {
    mantissa_ = std::exp(mantissa_);
    --level_;
  }
}

double TowerReal::to_double() const {
  if (level_ == 0) return mantissa_;
  if (level_ == 1) return std::exp(mantissa_);
  return std::numeric_limits<double>::infinity();
}

TowerReal TowerReal::exp() const {
  TowerReal t;
  if (level_ == 0) {
    if (mantissa_ < kLogLift) {
      t.mantissa_ = std::exp(mantissa_);
    } else {
      t.level_ = 1;
      t.mantissa_ = mantissa_;
    }
    return t;
  }
  t.level_ = level_ + 1;
  t.mantissa_ = mantissa_;
  return t;
}

TowerReal TowerReal::log() const {
  TowerReal t;
  if (level_ == 0) {
    if (!(mantissa_ > 0.0)) throw DomainError("TowerReal: log of non-positive value");
    t.mantissa_ = std::log(mantissa_);
    return t;
  }
  t.level_ = level_ - 1;
  t.mantissa_ = mantissa_;
  return t;
}

TowerReal TowerReal::plus(double a) const {
  if (level_ == 0) return TowerReal(mantissa_ + a);
  if (level_ == 1) {
    // e^m + a = e^{m + log1p(a e^{-m})}
    const double q = a * std::exp(-mantissa_);
    if (q <= -1.0) return TowerReal(std::exp(mantissa_) + a);
    return TowerReal(mantissa_ + std::log1p(q)).exp();
  }
  // At level >= 2 the value exceeds e^710; a double addend is below resolution.
  return *this;
}

TowerReal TowerReal::times(double c) const {
  if (!(c > 0.0)) throw ValidationError("TowerReal::times needs c > 0");
  if (level_ == 0) {
    const double v = mantissa_ * c;
    if (std::isfinite(v)) return TowerReal(v);
    // mantissa_ > 0 here since |mantissa_| < 710 and c is finite
    return TowerReal(std::log(mantissa_) + std::log(c)).exp();
  }
  return log().plus(std::log(c)).exp();
}

std::string TowerReal::to_string() const {
  char buf[64];
  if (level_ == 0) {
    std::snprintf(buf, sizeof buf, "%.17g", mantissa_);
  } else {
    std::snprintf(buf, sizeof buf, "exp^%d(%.17g)", level_, mantissa_);
  }
  return buf;
}

}  // namespace expdyn
