#include <cmath>
#include <limits>

#include "expdyn/core_dynamics.hpp"
#include "expdyn/errors.hpp"

namespace expdyn {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogDblMax = std::log(std::numeric_limits<double>::max());

}  // namespace

double wrap_angle(double theta) {
  double r = std::remainder(theta, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

double principal_arg(Complex z) {
  const double a = std::arg(z);
  return a <= -kPi ? kPi : a;
}

LogPolarComplex LogPolarComplex::from_native(Complex z) {
  LogPolarComplex p;
  const double m = std::abs(z);
  p.log_modulus = TowerReal(m == 0.0 ? -kInf : std::log(m));
  p.argument = m == 0.0 ? 0.0 : principal_arg(z);
  return p;
}

bool LogPolarComplex::is_zero() const {
  return log_modulus.level() == 0 && log_modulus.mantissa() == -kInf;
}

std::optional<Complex> LogPolarComplex::to_native() const {
  if (is_zero()) return Complex(0.0, 0.0);
  if (!log_modulus.is_native() || log_modulus.mantissa() >= kLogDblMax) return std::nullopt;
  return std::polar(std::exp(log_modulus.mantissa()), argument);
}

std::optional<double> SignedTower::to_native() const {
  if (sign == 0) return 0.0;
  const double m = magnitude.to_double();
  if (!std::isfinite(m)) return std::nullopt;
  return sign * m;
}

SignedTower OrbitPoint::real_part() const {
  SignedTower s;
  if (native) {
    const double x = z.real();
    s.sign = x > 0 ? 1 : (x < 0 ? -1 : 0);
    s.magnitude = TowerReal(std::fabs(x));
    return s;
  }
  const double c = exact_real ? (polar.argument == 0.0 ? 1.0 : -1.0) : std::cos(polar.argument);
  if (c == 0.0) return s;
  s.sign = c > 0 ? 1 : -1;
  s.magnitude = polar.log_modulus.plus(std::log(std::fabs(c))).exp();
  return s;
}

std::optional<double> OrbitPoint::imag_part() const {
  if (native) return z.imag();
  if (exact_real) return 0.0;
  const double s = std::sin(polar.argument);
  if (s == 0.0) return 0.0;
  const TowerReal log_im = polar.log_modulus.plus(std::log(std::fabs(s)));
  if (!log_im.is_native() || log_im.mantissa() >= kLogDblMax) return std::nullopt;
  return std::copysign(std::exp(log_im.mantissa()), s);
}

OrbitStepper::OrbitStepper(Complex lambda, bool snap_to_real)
    : lambda_(lambda),
      log_abs_(std::log(std::abs(lambda))),
      arg_(principal_arg(lambda)),
      real_(lambda.imag() == 0.0),
      snap_(snap_to_real) {
  if (lambda == Complex(0.0, 0.0) || !std::isfinite(lambda.real()) ||
      !std::isfinite(lambda.imag())) {
    throw ValidationError("lambda must be finite and nonzero");
  }
}

OrbitPoint OrbitStepper::make_native(Complex w, double error, bool exact) const {
  OrbitPoint p;
  p.native = true;
  if (snap_ && real_ && !exact && std::fabs(w.imag()) <= error) {
    // Consistent with the invariant real axis within the error bound.
    exact = true;
  }
  if (exact) {
    w = Complex(w.real(), 0.0);
    error = 0.0;
  }
  p.z = w;
  p.exact_real = exact;
  p.error = error;
  p.polar = LogPolarComplex::from_native(w);
  return p;
}

OrbitPoint OrbitStepper::start(Complex z0) const {
  if (!std::isfinite(z0.real()) || !std::isfinite(z0.imag())) {
    throw ValidationError("orbit start must be finite");
  }
  const bool exact = real_ && z0.imag() == 0.0;
  return make_native(z0, exact ? 0.0 : kEps * std::abs(z0), exact);
}

OrbitPoint OrbitStepper::step(const OrbitPoint& p) const {
  if (p.native) {
    const double x = p.z.real();
    const double y = p.exact_real ? 0.0 : p.z.imag();
    const double t = x + log_abs_;
    if (t < kNativeExpLimit) {
      if (p.exact_real) {
        return make_native(Complex(lambda_.real() * std::exp(x), 0.0), 0.0, true);
      }
      const Complex w = lambda_ * std::exp(Complex(x, y));
      const double err =
          std::exp(t) * (p.error + 4.0 * kEps * ((1.0 + std::fabs(y)) + std::fabs(arg_)));
      return make_native(w, err, false);
    }
    OrbitPoint q;
    q.native = false;
    q.exact_real = p.exact_real;
    q.polar.log_modulus = TowerReal(t);
    if (p.exact_real) {
      q.polar.argument = lambda_.real() > 0 ? 0.0 : kPi;
      q.error = 0.0;
    } else {
      q.polar.argument = wrap_angle(y + arg_);
      q.error = p.error + 4.0 * kEps * (std::fabs(y) + std::fabs(arg_));
    }
    return q;
  }

  // Far point: log|f(z)| = log|lambda| + Re z, arg f(z) = Im z + Arg lambda.
  const SignedTower re = p.real_part();
  TowerReal new_log;
  if (re.sign > 0) {
    new_log = re.magnitude.plus(log_abs_);
  } else if (re.sign == 0) {
    new_log = TowerReal(log_abs_);
  } else {
    const std::optional<double> neg = re.to_native();
    new_log = TowerReal(neg ? log_abs_ + *neg : -kInf);
  }

  double theta = 0.0;
  double theta_err = 0.0;
  bool exact = p.exact_real;
  if (exact) {
    theta = lambda_.real() > 0 ? 0.0 : kPi;
  } else {
    const std::optional<double> im = p.imag_part();
    const TowerReal log_abs_err = p.polar.log_modulus.plus(std::log(p.error + kEps));
    if (im && log_abs_err.is_native() && log_abs_err.mantissa() < kLogDblMax) {
      theta = wrap_angle(*im + arg_);
      theta_err = std::exp(log_abs_err.mantissa()) + 4.0 * kEps * (std::fabs(*im) + std::fabs(arg_));
    } else {
      theta = 0.0;
      theta_err = kInf;
    }
  }

  if (new_log < TowerReal(kNativeExpLimit)) {
    const double m = new_log.mantissa() == -kInf ? 0.0 : std::exp(new_log.mantissa());
    if (exact) return make_native(Complex(std::copysign(m, std::cos(theta)), 0.0), 0.0, true);
    return make_native(std::polar(m, theta), m * theta_err, false);
  }
  OrbitPoint q;
  q.native = false;
  q.exact_real = exact;
  q.polar.log_modulus = new_log;
  q.polar.argument = theta;
  q.error = theta_err;
  return q;
}

}  // namespace expdyn
