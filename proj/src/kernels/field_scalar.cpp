#include <cmath>
#include <limits>

#include "expdyn/core_dynamics.hpp"
#include "kernels/detmath.hpp"
#include "kernels/field_kernel.hpp"

namespace expdyn::kernels {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFourEps = 4.0 * kEps;
constexpr double kSupportedImag = 1e5;
constexpr double kUndecidedSin = 1e-12;

}  // namespace

StripParams make_strip_params(double lambda_re, double lambda_im, double lo, double hi, int depth) {
  const Complex lambda(lambda_re, lambda_im);
  StripParams p;
  p.lambda_re = lambda_re;
  p.lambda_im = lambda_im;
  p.abs_lambda = std::abs(lambda);
  p.log_abs_lambda = std::log(p.abs_lambda);
  p.arg_lambda = principal_arg(lambda);
  p.lambda_real = lambda_im == 0.0;
  p.lo = lo;
  p.hi = hi;
  p.depth = depth;
  return p;
}

bool strip_kernel_supported(const StripParams& p) {
  return std::max(std::fabs(p.lo), std::fabs(p.hi)) + std::fabs(p.arg_lambda) <= kSupportedImag;
}

LaneState initial_state(const StripParams& p, double x0, double y0) {
  LaneState s;
  s.x = x0;
  s.y = y0;
  s.exact = p.lambda_real && y0 == 0.0;
  s.err = s.exact ? 0.0 : kEps * std::sqrt(x0 * x0 + y0 * y0);
  return s;
}

NativeStop run_native(const StripParams& p, LaneState& s, bool* snapped) {
  const double abs_arg = std::fabs(p.arg_lambda);
  for (;;) {
    if (p.lambda_real && !s.exact && std::fabs(s.y) <= s.err) {
      s.y = 0.0;
      s.err = 0.0;
      s.exact = true;
      if (snapped) *snapped = true;
    }
    if (!(p.lo <= s.y && s.y <= p.hi)) return NativeStop::kExit;
    if (s.n == p.depth - 1) return NativeStop::kMember;
    if (!s.exact && s.err > kTwoPi) return NativeStop::kCaveat;
    const double t = s.x + p.log_abs_lambda;
    if (!(t < kNativeExpLimit) || !(s.x < kNativeExpLimit)) return NativeStop::kEscalate;
    const double m = detmath::exp(s.x);
    double sn;
    double cs;
    detmath::sincos(s.y, &sn, &cs);
    const double wr = m * cs;
    const double wi = m * sn;
    const double nx = p.lambda_re * wr - p.lambda_im * wi;
    const double ny = p.lambda_re * wi + p.lambda_im * wr;
    const double absw = m * p.abs_lambda;
    const double ne = absw * (s.err + kFourEps * ((1.0 + std::fabs(s.y)) + abs_arg));
    s.err = s.exact ? 0.0 : ne;
    s.x = nx;
    s.y = ny;
    ++s.n;
  }
}

namespace {

StripTrace native_trace(NativeStop stop, const LaneState& s, bool snapped) {
  StripTrace t;
  t.snapped = snapped;
  t.index = s.n;
  t.re = s.x;
  t.im = s.y;
  switch (stop) {
    case NativeStop::kExit:
      t.outcome = Outcome::kExit;
      break;
    case NativeStop::kMember:
      t.outcome = Outcome::kMember;
      break;
    case NativeStop::kCaveat:
      t.outcome = Outcome::kCaveat;
      break;
    case NativeStop::kEscalate:
      break;
  }
  return t;
}

// Log-scale strip test for Im = sign * e^{log_im}.
bool far_imag_in_strip(const StripParams& p, int sign, const TowerReal& log_im) {
  if (sign > 0) {
    if (!(p.hi > 0.0) || log_im > TowerReal(std::log(p.hi))) return false;
    return p.lo <= 0.0 || log_im >= TowerReal(std::log(p.lo));
  }
  if (!(p.lo < 0.0) || log_im > TowerReal(std::log(-p.lo))) return false;
  return p.hi >= 0.0 || log_im >= TowerReal(std::log(-p.hi));
}

}  // namespace

StripTrace continue_escalated(const StripParams& p, const LaneState& start) {
  LaneState s = start;
  bool snapped = false;
  for (;;) {
    // s is a member at index s.n < depth - 1 whose image is far.
    TowerReal log_mod(s.x + p.log_abs_lambda);
    double theta;
    double theta_err = 0.0;
    if (s.exact) {
      theta = p.lambda_re > 0.0 ? 0.0 : kPi;
    } else {
      theta = wrap_angle(s.y + p.arg_lambda);
      theta_err = s.err + kFourEps * (std::fabs(s.y) + std::fabs(p.arg_lambda));
    }
    int idx = s.n + 1;
    bool back_to_native = false;
    for (;;) {
      StripTrace t;
      t.snapped = snapped;
      t.index = idx;
      t.far = true;
      t.far_log_modulus = log_mod;
      t.far_argument = theta;
      if (s.exact) {
        if (!(p.lo <= 0.0 && 0.0 <= p.hi)) {
          t.outcome = Outcome::kExit;
          return t;
        }
      } else {
        const double sn = std::sin(theta);
        if (std::fabs(sn) <= std::max(kUndecidedSin, theta_err)) {
          t.outcome = Outcome::kUndecided;
          return t;
        }
        const TowerReal log_im = log_mod.plus(std::log(std::fabs(sn)));
        if (!far_imag_in_strip(p, sn > 0 ? 1 : -1, log_im)) {
          t.outcome = Outcome::kExit;
          return t;
        }
        // Inside an astronomically tall strip; the next argument is noise.
        t.outcome = Outcome::kCaveat;
        return t;
      }
      if (idx == p.depth - 1) {
        t.outcome = Outcome::kMember;
        t.index = p.depth;
        return t;
      }
      if (theta == 0.0) {
        // positive real e^{log_mod}
        log_mod = log_mod.exp().plus(p.log_abs_lambda);
        theta = p.lambda_re > 0.0 ? 0.0 : kPi;
        ++idx;
        continue;
      }
      // negative real of modulus >= e^709: the image underflows to 0
      s.x = p.lambda_re * 0.0;
      s.y = 0.0;
      s.err = 0.0;
      s.exact = true;
      s.n = idx + 1;
      back_to_native = true;
      break;
    }
    if (!back_to_native) continue;
    const NativeStop stop = run_native(p, s, &snapped);
    if (stop != NativeStop::kEscalate) {
      StripTrace t = native_trace(stop, s, snapped);
      if (stop == NativeStop::kMember) t.index = p.depth;
      return t;
    }
  }
}

StripTrace trace_strip_point(const StripParams& p, double x0, double y0) {
  LaneState s = initial_state(p, x0, y0);
  bool snapped = false;
  const NativeStop stop = run_native(p, s, &snapped);
  if (stop == NativeStop::kEscalate) {
    StripTrace t = continue_escalated(p, s);
    t.snapped = t.snapped || snapped;
    return t;
  }
  StripTrace t = native_trace(stop, s, snapped);
  if (stop == NativeStop::kMember) t.index = p.depth;
  return t;
}

std::int32_t conservative_code(const StripTrace& t, int depth) {
  switch (t.outcome) {
    case Outcome::kExit:
    case Outcome::kUndecided:
      return t.index + 1;
    case Outcome::kMember:
    case Outcome::kCaveat:
      break;
  }
  return depth + 1;
}

std::int32_t optimistic_code(const StripTrace& t, int depth) {
  return t.outcome == Outcome::kExit ? t.index + 1 : depth + 1;
}

void strip_field_scalar(const StripParams& p, const double* re, const double* im,
                        std::size_t count, std::int32_t* conservative, std::int32_t* optimistic) {
  for (std::size_t i = 0; i < count; ++i) {
    const StripTrace t = trace_strip_point(p, re[i], im[i]);
    conservative[i] = conservative_code(t, p.depth);
    optimistic[i] = optimistic_code(t, p.depth);
  }
}

}  // namespace expdyn::kernels
