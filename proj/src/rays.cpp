#include "expdyn/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "expdyn/errors.hpp"

namespace expdyn {
namespace {

// Point with a possibly huge positive real part.
struct FarPoint {
  TowerReal re;
  double im = 0.0;
};

TowerReal seed_real_part(double t, int depth) {
  TowerReal x(t);
  for (int i = 0; i < depth; ++i) {
    if (x.is_native() && x.mantissa() < 1.0) {
      x = TowerReal(std::expm1(x.mantissa()));
    } else {
      x = x.exp().plus(-1.0);
    }
  }
  return x;
}

FarPoint pull_back(const OrbitStepper& st, const FarPoint& w, std::int64_t k) {
  const double a = st.arg_lambda();
  if (w.re.is_native()) {
    const Complex z = inverse_branch(st.lambda(), Complex(w.re.mantissa(), w.im), k);
    return {TowerReal(z.real()), z.imag()};
  }
  const double re = w.re.to_double();  // may be +inf
  const double q = w.im / re;
  const TowerReal log_mod = w.re.log().plus(0.5 * std::log1p(q * q) - st.log_abs_lambda());
  double im = std::atan2(w.im, re) - a + kTwoPi * static_cast<double>(k);
  std::int64_t j = strip_index_of_imag(a, im);
  if (j != k) im += kTwoPi * static_cast<double>(k - j);
  return {log_mod, im};
}

}  // namespace

namespace {

// Pulls back and reports whether every step satisfied Re w >= Re z (the
// forward orbit of a ray point moves right).
Complex pullback_chain(Complex lambda, const ExternalAddress& s, double t, int depth,
                       bool* monotone) {
  if (depth < 1) throw ValidationError("pullback: depth must be >= 1");
  if (!(t > 0.0)) throw ValidationError("pullback: t must be positive");
  const OrbitStepper st(lambda);
  FarPoint w{seed_real_part(t, depth),
             kTwoPi * static_cast<double>(s.entry(static_cast<std::size_t>(depth))) -
                 st.arg_lambda()};
  bool ok = true;
  for (int n = depth - 1; n >= 0; --n) {
    const FarPoint z = pull_back(st, w, s.entry(static_cast<std::size_t>(n)));
    if (w.re.is_native() && z.re.is_native()) {
      const double slack = 1e-9 * (1.0 + std::fabs(z.re.mantissa()));
      if (w.re.mantissa() < z.re.mantissa() - slack) ok = false;
    }
    w = z;
  }
  if (!w.re.is_native()) throw RangeError("pullback: ray point outside native range");
  if (monotone) *monotone = ok;
  return {w.re.mantissa(), w.im};
}

}  // namespace

Complex pullback_point(Complex lambda, const ExternalAddress& s, double t, int depth) {
  return pullback_chain(lambda, s, t, depth, nullptr);
}

namespace {

RaySample trace_sample(Complex lambda, const ExternalAddress& s, double t, int depth,
                       double tol, bool* monotone = nullptr) {
  const Complex a = pullback_chain(lambda, s, t, depth, monotone);
  const Complex b = pullback_point(lambda, s, t, depth + kRayCheckExtraDepth);
  RaySample sample;
  sample.t = t;
  sample.point = a;
  sample.depth = depth;
  sample.residual = std::abs(a - b);
  sample.low_confidence = t < 2.0;
  if (!(sample.residual < tol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "trace_ray: depth %d and %d disagree by %.3g at t=%.17g", depth,
                  depth + kRayCheckExtraDepth, sample.residual, t);
    throw ConvergenceError(buf);
  }
  return sample;
}

}  // namespace

Ray trace_ray(Complex lambda, const ExternalAddress& s, const std::vector<double>& t_values,
              int depth, double tol) {
  if (depth < 1) throw ValidationError("trace_ray: depth must be >= 1");
  if (s.empty()) throw ValidationError("trace_ray: empty address");
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    if (!(t_values[i] >= 1.0)) throw ValidationError("trace_ray: t values must be >= 1");
    if (i > 0 && !(t_values[i] > t_values[i - 1])) {
      throw ValidationError("trace_ray: t values must be strictly increasing");
    }
  }
  if (!s.is_infinite() && s.length() <= static_cast<std::size_t>(depth + kRayCheckExtraDepth)) {
    throw ValidationError("trace_ray: address prefix shorter than depth + 5");
  }
  Ray ray;
  ray.address = s;
  ray.depth = depth;
  for (double t : t_values) {
    ray.samples.push_back(trace_sample(lambda, s, t, depth, tol));
    ray.residual = std::max(ray.residual, ray.samples.back().residual);
  }
  return ray;
}

double ray_asymptote(Complex lambda, const ExternalAddress& s) {
  if (s.empty()) throw ValidationError("ray_asymptote: empty address");
  return kTwoPi * static_cast<double>(s.entry(0)) - principal_arg(lambda);
}

double forward_invariance_defect(Complex lambda, const ExternalAddress& s, double t, int depth) {
  const Complex z = pullback_point(lambda, s, t, depth);
  const Complex image = eval_map(lambda, z);
  const Complex traced = pullback_point(lambda, s.shift(), std::expm1(t), depth);
  return std::abs(image - traced);
}

LandingReport landing_probe(Complex lambda, const ExternalAddress& s,
                            const std::vector<double>& t_decreasing, int depth,
                            const LandingOptions& options) {
  for (std::size_t i = 1; i < t_decreasing.size(); ++i) {
    if (!(t_decreasing[i] < t_decreasing[i - 1])) {
      throw ValidationError("landing_probe: t sequence must be decreasing");
    }
  }
  LandingReport report;
  for (double t : t_decreasing) {
    try {
      bool monotone = true;
      const RaySample sample = trace_sample(lambda, s, t, depth, options.tol, &monotone);
      // A chain that moves left somewhere was captured by a non-escaping
      // point rather than following the ray; smaller t will not recover.
      if (!monotone) break;
      report.t_used.push_back(t);
      report.endpoints.push_back(sample.point);
    } catch (const ConvergenceError&) {
      // Smaller t only gets harder; keep what converged.
      break;
    }
  }
  const auto window = static_cast<std::size_t>(options.window);
  if (report.endpoints.size() < window || window < 3) return report;
  const std::size_t first = report.endpoints.size() - window;
  for (std::size_t i = first; i < report.endpoints.size(); ++i) {
    for (std::size_t j = i + 1; j < report.endpoints.size(); ++j) {
      report.spread = std::max(report.spread, std::abs(report.endpoints[i] - report.endpoints[j]));
    }
  }
  bool cauchy = true;
  for (std::size_t i = first + 1; i + 1 < report.endpoints.size(); ++i) {
    const double g0 = std::abs(report.endpoints[i] - report.endpoints[i - 1]);
    const double g1 = std::abs(report.endpoints[i + 1] - report.endpoints[i]);
    if (!(g1 * options.cauchy_factor <= g0)) cauchy = false;
  }
  if (cauchy) {
    report.cls = LandingClass::kLanding;
    report.landing_point = report.endpoints.back();
  } else if (report.spread > options.spread_threshold) {
    report.cls = LandingClass::kAccumulating;
  }
  return report;
}

const char* to_string(LandingClass c) {
  switch (c) {
    case LandingClass::kLanding:
      return "apparently-landing";
    case LandingClass::kAccumulating:
      return "apparently-accumulating";
    case LandingClass::kUndecided:
      break;
  }
  return "undecided";
}

void write_ray_csv(const Ray& ray, std::ostream& out) {
  out << "t,re,im,depth,residual\n";
  char buf[256];
  for (const RaySample& s : ray.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%.17g\n", s.t, s.point.real(),
                  s.point.imag(), s.depth, s.residual);
    out << buf;
  }
}

void write_ray_csv(const Ray& ray, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_ray_csv(ray, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace expdyn
