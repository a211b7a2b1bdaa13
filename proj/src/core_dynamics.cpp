#include "expdyn/core_dynamics.hpp"

#include <cmath>
#include <limits>

#include "expdyn/errors.hpp"
#include "expdyn/symbolic.hpp"

namespace expdyn {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kLogDblMax = std::log(std::numeric_limits<double>::max());
const double kLogDerivativeCap = std::log(1e15);

}  // namespace

Complex eval_map(Complex lambda, Complex z) {
  const double t = z.real() + std::log(std::abs(lambda));
  if (!(t < kLogDblMax)) {
    throw RangeError("eval_map: |lambda| e^{Re z} overflows; use log-polar iteration");
  }
  if (z.real() < kLogDblMax) return lambda * std::exp(z);
  return std::polar(std::exp(t), z.imag() + principal_arg(lambda));
}

Orbit iterate_orbit(Complex lambda, Complex z0, int steps, double escape_log_modulus) {
  if (steps < 0) throw ValidationError("iterate_orbit: steps must be >= 0");
  const OrbitStepper stepper(lambda);
  const TowerReal escape(escape_log_modulus);
  Orbit orbit;
  orbit.points.reserve(static_cast<std::size_t>(steps) + 1);
  orbit.points.push_back(stepper.start(z0));
  double log_derivative = 0.0;
  for (int n = 0;; ++n) {
    const OrbitPoint& p = orbit.points.back();
    if (!orbit.escape_index && p.polar.log_modulus > escape) orbit.escape_index = n;
    if (!orbit.untrusted_from && !p.argument_trusted()) orbit.untrusted_from = n;
    if (n > 0) {
      const double lm = p.polar.log_modulus.to_double();
      log_derivative += lm;
      if (!(log_derivative <= kLogDerivativeCap)) orbit.precision_lost = true;
    }
    if (n == steps) break;
    orbit.points.push_back(stepper.step(p));
  }
  return orbit;
}

double orbit_derivative_log(Complex lambda, Complex z0, int n) {
  if (n < 0) throw ValidationError("orbit_derivative_log: n must be >= 0");
  Complex z = z0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    z = eval_map(lambda, z);
    const double m = std::abs(z);
    if (!std::isfinite(m)) throw RangeError("orbit_derivative_log: orbit left native range");
    sum += std::log(m);
  }
  return sum;
}

Complex inverse_branch(Complex lambda, Complex w, std::int64_t k) {
  if (w == Complex(0.0, 0.0)) throw DomainError("inverse_branch: 0 has no preimage");
  const double a = principal_arg(lambda);
  const double re = std::log(std::abs(w)) - std::log(std::abs(lambda));
  double im = principal_arg(w) - a + kTwoPi * static_cast<double>(k);
  // Rounding can land a hair outside the half-open strip; move it back in.
  std::int64_t j = strip_index_of_imag(a, im);
  if (j != k) {
    im += kTwoPi * static_cast<double>(k - j);
    for (int guard = 0; guard < 64; ++guard) {
      j = strip_index_of_imag(a, im);
      if (j == k) break;
      im = std::nextafter(im, j < k ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity());
    }
    if (j != k) throw RangeError("inverse_branch: cannot place preimage in strip");
  }
  return {re, im};
}

std::vector<OrbitPoint> singular_orbit(Complex lambda, int n) {
  if (n < 1) throw ValidationError("singular_orbit: N must be >= 1");
  const OrbitStepper stepper(lambda);
  std::vector<OrbitPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  OrbitPoint p = stepper.start(Complex(0.0, 0.0));
  for (int i = 1; i <= n; ++i) {
    p = stepper.step(p);
    out.push_back(p);
  }
  return out;
}

namespace {

// log(alpha) for a point with positive real part.
TowerReal log_real_part(const OrbitPoint& p) {
  if (p.native) return TowerReal(std::log(p.z.real()));
  const double c = p.exact_real ? 1.0 : std::cos(p.polar.argument);
  return p.polar.log_modulus.plus(std::log(c));
}

// Tolerance for comparing logarithms that were rounded in native range.
double log_slack(const TowerReal& t) {
  if (!t.is_native()) return 0.0;
  return 8.0 * kEps * (1.0 + std::fabs(t.mantissa()));
}

}  // namespace

SupergrowthReport check_supergrowth(Complex lambda, double c, int steps,
                                    const SupergrowthOptions& options) {
  const int n_min = options.n_min;
  if (!(c > 0.0)) throw ValidationError("check_supergrowth: c must be > 0");
  if (n_min < 1 || steps <= n_min) throw ValidationError("check_supergrowth: need N > n_min >= 1");
  const std::vector<OrbitPoint> beta = singular_orbit(lambda, steps);
  // beta[i] holds beta_{i+1}.
  auto at = [&](int n) -> const OrbitPoint& { return beta[static_cast<std::size_t>(n - 1)]; };
  const double log_c = std::log(c);
  const double abs_lambda = std::abs(lambda);

  SupergrowthReport report;
  report.holds = true;
  std::optional<double> min_log_ratio;
  auto fail = [&](int n, const std::string& why) {
    if (report.holds) {
      report.holds = false;
      report.first_failure_index = n;
      report.failure_reason = why;
    }
  };

  for (int n = n_min; n < steps; ++n) {
    SupergrowthEntry e;
    e.n = n;
    const OrbitPoint& bn = at(n);
    const OrbitPoint& bn1 = at(n + 1);
    const SignedTower an = bn.real_part();
    const SignedTower an1 = bn1.real_part();
    if (!bn.exact_real && !bn.argument_trusted()) {
      e.holds = false;
      report.entries.push_back(e);
      fail(n, "argument of beta_n untrusted");
      continue;
    }
    if (bn.polar.is_zero() || bn1.polar.is_zero()) {
      report.entries.push_back(e);
      fail(n, "orbit hits 0 exactly");
      continue;
    }
    e.superreal = abs_lambda * std::cos(bn.polar.argument) / c;
    if (an.sign <= 0 || an1.sign <= 0) {
      report.entries.push_back(e);
      fail(n, "alpha_n <= 0");
      continue;
    }
    const TowerReal lhs = log_real_part(bn1);
    const TowerReal rhs = an.magnitude.plus(log_c);
    const double slack = std::max(log_slack(lhs), log_slack(rhs));
    e.holds = lhs >= rhs || (slack > 0.0 && lhs.is_native() && rhs.is_native() &&
                             lhs.mantissa() >= rhs.mantissa() - slack);
    const double l = lhs.to_double();
    const double r = rhs.to_double();
    if (std::isfinite(l) && std::isfinite(r)) {
      const double lr = l - r;
      e.ratio = std::exp(lr);
      report.ratios.push_back(*e.ratio);
      const double log_cmax = lr + log_c;
      min_log_ratio = min_log_ratio ? std::min(*min_log_ratio, log_cmax) : log_cmax;
    }
    if (!e.holds) fail(n, "alpha_{n+1} < c e^{alpha_n}");
    report.entries.push_back(e);
  }

  // alpha_n -> infinity, made finite.
  const SignedTower last = at(steps).real_part();
  if (last.sign <= 0 || last.magnitude < TowerReal(options.escape_alpha)) {
    fail(steps, "orbit does not escape (alpha_N below escape threshold)");
  }

  if (min_log_ratio) report.max_passing_c = std::exp(*min_log_ratio);

  // Lemma-style tail diagnostic at the last n where alpha_{n+1} is native.
  double sum = 0.0;
  for (int n = 1; n < steps; ++n) {
    const auto an = at(n).real_part().to_native();
    const auto an1 = at(n + 1).real_part().to_native();
    if (!an || !an1) break;
    sum += *an;
    if (*an1 != 0.0) report.tail_ratio = sum / *an1;
  }
  return report;
}

}  // namespace expdyn
