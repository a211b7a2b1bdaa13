#include "expdyn/lambda_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "expdyn/errors.hpp"
#include "expdyn/parallel.hpp"
#include "kernels/field_kernel.hpp"

namespace expdyn {
namespace {

constexpr double kUndecidedSin = 1e-12;

void set_codes(MembershipResult& r, int depth) {
  switch (r.status) {
    case MembershipStatus::kExit:
      r.conservative_code = r.optimistic_code = r.depth + 1;
      break;
    case MembershipStatus::kUndecided:
      r.conservative_code = r.depth + 1;
      r.optimistic_code = depth + 1;
      break;
    case MembershipStatus::kMember:
      r.conservative_code = r.optimistic_code = depth + 1;
      break;
  }
}

MembershipResult from_trace(const kernels::StripTrace& t, int depth) {
  MembershipResult r;
  r.snapped_to_real = t.snapped;
  switch (t.outcome) {
    case kernels::Outcome::kExit:
      r.status = MembershipStatus::kExit;
      r.depth = t.index;
      r.exit_index = t.index;
      r.verified_depth = t.index;
      if (t.far) {
        LogPolarComplex lp;
        lp.log_modulus = t.far_log_modulus;
        lp.argument = t.far_argument;
        r.exit_polar = lp;
      } else {
        r.exit_point = Complex(t.re, t.im);
        r.exit_polar = LogPolarComplex::from_native(*r.exit_point);
      }
      break;
    case kernels::Outcome::kUndecided:
      r.status = MembershipStatus::kUndecided;
      r.depth = t.index;
      r.verified_depth = t.index;
      break;
    case kernels::Outcome::kCaveat:
      r.status = MembershipStatus::kMember;
      r.depth = depth;
      r.precision_caveat = true;
      r.verified_depth = t.index + 1;
      break;
    case kernels::Outcome::kMember:
      r.status = MembershipStatus::kMember;
      r.depth = depth;
      r.verified_depth = depth;
      break;
  }
  set_codes(r, depth);
  return r;
}

bool use_strip_kernel(const ThinSetSpec& spec, Complex lambda, int depth,
                      kernels::StripParams* out) {
  const auto bounds = spec.strip_bounds();
  if (!bounds) return false;
  const kernels::StripParams p =
      kernels::make_strip_params(lambda.real(), lambda.imag(), bounds->first, bounds->second, depth);
  if (!kernels::strip_kernel_supported(p)) return false;
  *out = p;
  return true;
}

// Far, non-exact point: decide strip membership in log scale.
std::optional<MembershipStatus> far_strip_status(const ThinSetSpec& spec, const OrbitPoint& p) {
  const auto bounds = spec.strip_bounds();
  if (!bounds) return std::nullopt;
  const double sn = std::sin(p.polar.argument);
  if (std::fabs(sn) <= std::max(kUndecidedSin, p.error)) return MembershipStatus::kUndecided;
  const TowerReal log_im = p.polar.log_modulus.plus(std::log(std::fabs(sn)));
  const auto [lo, hi] = *bounds;
  bool inside;
  if (sn > 0) {
    inside = hi > 0.0 && !(log_im > TowerReal(std::log(hi))) &&
             (lo <= 0.0 || log_im >= TowerReal(std::log(lo)));
  } else {
    inside = lo < 0.0 && !(log_im > TowerReal(std::log(-lo))) &&
             (hi >= 0.0 || log_im >= TowerReal(std::log(-hi)));
  }
  return inside ? MembershipStatus::kMember : MembershipStatus::kExit;
}

MembershipResult generic_membership(Complex lambda, const ThinSetSpec& spec, Complex z, int depth) {
  const OrbitStepper stepper(lambda);
  MembershipResult r;
  OrbitPoint p = stepper.start(z);
  auto finish_exit = [&](int n) {
    r.status = MembershipStatus::kExit;
    r.depth = n;
    r.exit_index = n;
    r.verified_depth = n;
    if (p.native) r.exit_point = p.z;
    r.exit_polar = p.polar;
  };
  for (int n = 0; n < depth; ++n) {
    if (n > 0) p = stepper.step(p);
    if (p.exact_real && p.native && z.imag() != 0.0) r.snapped_to_real = true;
    bool inside;
    if (p.native) {
      inside = spec.contains(p.z);
    } else if (p.exact_real) {
      inside = spec.contains_far_real();
    } else {
      const auto st = far_strip_status(spec, p);
      if (!st || *st == MembershipStatus::kMember) {
        // Predicate cannot be evaluated (or is satisfied) at this scale and the
        // next argument is noise.
        r.status = MembershipStatus::kMember;
        r.depth = depth;
        r.precision_caveat = true;
        r.verified_depth = st ? n + 1 : n;
        set_codes(r, depth);
        return r;
      }
      if (*st == MembershipStatus::kUndecided) {
        r.status = MembershipStatus::kUndecided;
        r.depth = n;
        r.verified_depth = n;
        set_codes(r, depth);
        return r;
      }
      inside = false;
    }
    if (!inside) {
      finish_exit(n);
      set_codes(r, depth);
      return r;
    }
    if (n == depth - 1) break;
    if (!p.argument_trusted()) {
      r.status = MembershipStatus::kMember;
      r.depth = depth;
      r.precision_caveat = true;
      r.verified_depth = n + 1;
      set_codes(r, depth);
      return r;
    }
  }
  r.status = MembershipStatus::kMember;
  r.depth = depth;
  r.verified_depth = depth;
  set_codes(r, depth);
  return r;
}

}  // namespace

MembershipResult lambda_membership(Complex lambda, const ThinSetSpec& spec, Complex z, int depth) {
  if (depth < 1) throw ValidationError("lambda_membership: N must be >= 1");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw ValidationError("lambda_membership: non-finite point");
  }
  const OrbitStepper check(lambda);  // validates lambda
  (void)check;
  kernels::StripParams p;
  if (use_strip_kernel(spec, lambda, depth, &p)) {
    return from_trace(kernels::trace_strip_point(p, z.real(), z.imag()), depth);
  }
  return generic_membership(lambda, spec, z, depth);
}

Complex window_pixel(const Window& w, int nx, int ny, int ix, int iy) {
  return {w.x0 + (w.x1 - w.x0) * static_cast<double>(ix) / static_cast<double>(nx - 1),
          w.y0 + (w.y1 - w.y0) * static_cast<double>(iy) / static_cast<double>(ny - 1)};
}

Complex ExitDepthField::pixel(int ix, int iy) const { return window_pixel(window, nx, ny, ix, iy); }

ExitDepthField sample_lambda_set(Complex lambda, const ThinSetSpec& spec, const Window& window,
                                 int nx, int ny, int depth, const SampleOptions& options) {
  if (nx < 2 || ny < 2) throw ValidationError("sample_lambda_set: resolution must be >= 2x2");
  if (!(window.x1 > window.x0) || !(window.y1 > window.y0)) {
    throw ValidationError("sample_lambda_set: degenerate window");
  }
  if (depth < 1) throw ValidationError("sample_lambda_set: N must be >= 1");
  const OrbitStepper check(lambda);
  (void)check;
  ExitDepthField field;
  field.window = window;
  field.nx = nx;
  field.ny = ny;
  field.depth = depth;
  const std::size_t total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  field.conservative.assign(total, 0);
  field.optimistic.assign(total, 0);

  kernels::StripParams params;
  const bool strip = use_strip_kernel(spec, lambda, depth, &params);
  const kernels::Backend backend = options.backend.value_or(kernels::default_backend());

  parallel_for(
      static_cast<std::size_t>(ny),
      [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<double> re(static_cast<std::size_t>(nx));
        std::vector<double> im(static_cast<std::size_t>(nx));
        for (std::size_t iy = row_begin; iy < row_end; ++iy) {
          const std::size_t off = iy * static_cast<std::size_t>(nx);
          for (int ix = 0; ix < nx; ++ix) {
            const Complex z = window_pixel(window, nx, ny, ix, static_cast<int>(iy));
            re[static_cast<std::size_t>(ix)] = z.real();
            im[static_cast<std::size_t>(ix)] = z.imag();
          }
          if (strip) {
            kernels::strip_field(backend, params, re.data(), im.data(), re.size(),
                                 field.conservative.data() + off, field.optimistic.data() + off);
          } else {
            for (std::size_t ix = 0; ix < re.size(); ++ix) {
              const MembershipResult r =
                  generic_membership(lambda, spec, Complex(re[ix], im[ix]), depth);
              field.conservative[off + ix] = r.conservative_code;
              field.optimistic[off + ix] = r.optimistic_code;
            }
          }
        }
      },
      options.workers);
  return field;
}

std::vector<Complex> field_survivors(const ExitDepthField& field) {
  std::vector<Complex> out;
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      if (field.survivor(ix, iy)) out.push_back(field.pixel(ix, iy));
    }
  }
  return out;
}

void write_field_csv(const ExitDepthField& field, std::ostream& out) {
  out << "ix,iy,re,im,exit_depth\n";
  char buf[160];
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      const Complex z = field.pixel(ix, iy);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%d\n", ix, iy, z.real(), z.imag(),
                    field.at(ix, iy));
      out << buf;
    }
  }
}

void write_field_pgm16(const ExitDepthField& field, std::ostream& out) {
  out << "P5\n" << field.nx << ' ' << field.ny << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(field.nx) * 2);
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) {
      const int v = std::clamp<int>(field.at(ix, iy), 0, 65535);
      row[static_cast<std::size_t>(ix) * 2] = static_cast<unsigned char>(v >> 8);
      row[static_cast<std::size_t>(ix) * 2 + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

namespace {

template <typename Writer>
void write_file(const std::string& path, Writer&& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  w(out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

void write_field_csv(const ExitDepthField& field, const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_field_csv(field, o); });
}

void write_field_pgm16(const ExitDepthField& field, const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_field_pgm16(field, o); });
}

TrajectoryClass classify_trajectory(Complex lambda, Complex z, int steps, double R_bound,
                                    double escape_log_modulus) {
  if (steps < 0) throw ValidationError("classify_trajectory: N must be >= 0");
  if (!(R_bound > 0.0) || !(std::log(R_bound) < escape_log_modulus)) {
    throw ValidationError("classify_trajectory: need R_bound > 0 and log R_bound < escape_log_modulus");
  }
  const Orbit orbit = iterate_orbit(lambda, z, steps, escape_log_modulus);
  TrajectoryClass c;
  if (orbit.escape_index) {
    c.kind = TrajectoryKind::kEscaping;
    c.evidence = *orbit.escape_index;
    c.max_modulus = std::numeric_limits<double>::infinity();
    return c;
  }
  bool bounded = true;
  for (const OrbitPoint& p : orbit.points) {
    const double m = p.native ? std::abs(p.z) : std::numeric_limits<double>::infinity();
    c.max_modulus = std::max(c.max_modulus, m);
    if (!(m <= R_bound)) bounded = false;
  }
  c.kind = bounded ? TrajectoryKind::kBounded : TrajectoryKind::kUndecided;
  c.evidence = steps;
  return c;
}

const char* to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kBounded:
      return "bounded";
    case TrajectoryKind::kEscaping:
      return "escaping";
    case TrajectoryKind::kUndecided:
      break;
  }
  return "undecided";
}

ExpansionEstimate measure_expansion(Complex lambda, double R, const std::vector<Complex>& samples,
                                    int n) {
  if (n < 1) throw ValidationError("measure_expansion: n must be >= 1");
  ExpansionEstimate est;
  std::vector<std::vector<double>> logs;  // d_0 = 0, d_j = log|(f^j)'(z)|
  for (const Complex& z0 : samples) {
    if (!(std::abs(z0) <= R)) continue;
    std::vector<double> d{0.0};
    Complex z = z0;
    bool ok = true;
    for (int j = 1; j <= n && ok; ++j) {
      if (!(z.real() + std::log(std::abs(lambda)) < kNativeExpLimit)) {
        ok = false;
        break;
      }
      z = eval_map(lambda, z);
      const double m = std::abs(z);
      if (!(m <= R) || m == 0.0) {
        ok = false;
        break;
      }
      d.push_back(d.back() + std::log(m));
    }
    if (ok) logs.push_back(std::move(d));
  }
  est.survivors = logs.size();
  if (logs.empty()) {
    est.note = "no surviving samples";
    return est;
  }
  est.has_samples = true;
  double min_slope = std::numeric_limits<double>::infinity();
  for (const auto& d : logs) {
    // least squares through (j, d_j), j = 0..n
    const double m = static_cast<double>(n) / 2.0;
    double my = 0.0;
    for (double v : d) my += v;
    my /= static_cast<double>(d.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      const double dx = static_cast<double>(j) - m;
      sxy += dx * (d[j] - my);
      sxx += dx * dx;
    }
    min_slope = std::min(min_slope, sxy / sxx);
  }
  double min_intercept = std::numeric_limits<double>::infinity();
  for (const auto& d : logs) {
    for (std::size_t j = 1; j < d.size(); ++j) {
      min_intercept = std::min(min_intercept, d[j] - static_cast<double>(j) * min_slope);
    }
  }
  est.gamma = std::exp(min_slope);
  est.c = std::exp(min_intercept);
  return est;
}

}  // namespace expdyn
