// expdyn command-line front end.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "expdyn/core_dynamics.hpp"
#include "expdyn/dimension.hpp"
#include "expdyn/errors.hpp"
#include "expdyn/induced.hpp"
#include "expdyn/kernels.hpp"
#include "expdyn/lambda_set.hpp"
#include "expdyn/rays.hpp"
#include "expdyn/thin_set.hpp"

namespace {

using namespace expdyn;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNotAchieved = 3;
constexpr int kExitRange = 4;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError(std::string("bad number for ") + what + ": '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw ValidationError(std::string("bad number for ") + what + ": '" + s + "'");
  }
  return v;
}

std::vector<double> numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& p : split(text, ',')) out.push_back(to_double(p, what));
  return out;
}

// "RE,IM" or "RE".
Complex complex_arg(const std::string& text, const char* what) {
  const std::vector<double> v = numbers(text, what);
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() != 2) throw ValidationError(std::string(what) + " must be RE,IM");
  return {v[0], v[1]};
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}


// orbit ------------------------------------------------------------------

struct OrbitArgs {
  std::string lambda, z, csv;
  int steps = 10;
};

int run_orbit(const OrbitArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const Complex z = complex_arg(a.z, "--z");
  if (a.steps < 0) throw ValidationError("--steps must be >= 0");
  const Orbit orbit = iterate_orbit(lambda, z, a.steps);
  auto write = [&](std::ostream& out) {
    out << "n,re,im,log_modulus,argument\n";
    for (std::size_t n = 0; n < orbit.points.size(); ++n) {
      const OrbitPoint& p = orbit.points[n];
      out << n << ',';
      if (p.native) {
        out << fmt(p.z.real()) << ',' << fmt(p.z.imag());
      } else {
        out << ',';
      }
      out << ',' << p.polar.log_modulus.to_string() << ',' << fmt(p.polar.argument) << '\n';
    }
  };
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    write(out);
    if (!out) throw IoError("write failed for '" + a.csv + "'");
  } else {
    write(std::cout);
  }
  if (orbit.escape_index) std::cerr << "escaped at n=" << *orbit.escape_index << '\n';
  if (orbit.untrusted_from) std::cerr << "argument untrusted from n=" << *orbit.untrusted_from << '\n';
  if (orbit.precision_lost) std::cerr << "derivative product exceeded 1e15\n";
  return kExitOk;
}

// supergrowth ------------------------------------------------------------

struct SupergrowthArgs {
  std::string lambda, json;
  double c = 1.0;
  int steps = 30;
};

int run_supergrowth(const SupergrowthArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const SupergrowthReport r = check_supergrowth(lambda, a.c, a.steps);
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["lambda"] = {lambda.real(), lambda.imag()};
  j["c"] = a.c;
  j["steps"] = a.steps;
  j["holds"] = r.holds;
  j["first_failure_index"] = r.first_failure_index ? nlohmann::ordered_json(*r.first_failure_index) : nullptr;
  j["failure_reason"] = r.failure_reason;
  auto entries = nlohmann::ordered_json::array();
  for (const SupergrowthEntry& e : r.entries) {
    nlohmann::ordered_json x;
    x["n"] = e.n;
    x["holds"] = e.holds;
    x["ratio"] = e.ratio ? nlohmann::ordered_json(*e.ratio) : nullptr;
    x["superreal"] = e.superreal ? nlohmann::ordered_json(*e.superreal) : nullptr;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  j["tail_ratio"] = r.tail_ratio ? nlohmann::ordered_json(*r.tail_ratio) : nullptr;
  j["max_passing_c"] = r.max_passing_c ? nlohmann::ordered_json(*r.max_passing_c) : nullptr;
  if (!a.json.empty()) {
    auto out = open_out(a.json);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + a.json + "'");
  }
  std::cout << "supergrowth " << (r.holds ? "holds" : "fails");
  if (!r.holds) std::cout << " at n=" << r.first_failure_index.value_or(-1) << ": " << r.failure_reason;
  std::cout << '\n';
  if (r.max_passing_c) std::cout << "largest passing c " << fmt(*r.max_passing_c) << '\n';
  return kExitOk;
}

// ray --------------------------------------------------------------------

struct RayArgs {
  std::string lambda, address, t, csv;
  int depth = 20;
};

std::vector<double> t_range(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError("--t must be T0:T1:STEP");
  const double t0 = to_double(parts[0], "--t");
  const double t1 = to_double(parts[1], "--t");
  const double step = to_double(parts[2], "--t");
  if (!(step > 0.0) || t1 < t0) throw ValidationError("--t needs T0 <= T1 and STEP > 0");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double t = t0 + step * i;
    if (t > t1 + 1e-9 * step) break;
    out.push_back(t);
    if (out.size() > 1000000) throw ValidationError("--t produces too many samples");
  }
  return out;
}

int run_ray(const RayArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const ExternalAddress s = ExternalAddress::parse(a.address);
  const Ray ray = trace_ray(lambda, s, t_range(a.t), a.depth);
  if (!a.csv.empty()) {
    write_ray_csv(ray, a.csv);
  } else {
    write_ray_csv(ray, std::cout);
  }
  std::cerr << "max residual " << fmt(ray.residual) << ", asymptote Im -> "
            << fmt(ray_asymptote(lambda, s)) << '\n';
  return kExitOk;
}

// lambdaset --------------------------------------------------------------

struct LambdaSetArgs {
  std::string lambda, set, window, res, pgm, csv, ppm, palette = "fire", backend;
  int depth = 20;
};

int run_lambdaset(const LambdaSetArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const ThinSetSpec spec = ThinSetSpec::parse(a.set);
  const std::vector<double> w = numbers(a.window, "--window");
  if (w.size() != 4) throw ValidationError("--window must be X0,Y0,X1,Y1");
  const std::vector<double> res = numbers(a.res, "--res");
  if (res.size() != 2 || res[0] != std::floor(res[0]) || res[1] != std::floor(res[1]) ||
      res[0] > 1e5 || res[1] > 1e5) {
    throw ValidationError("--res must be NX,NY");
  }
  SampleOptions opts;
  if (a.backend == "scalar") {
    opts.backend = kernels::Backend::kScalar;
  } else if (a.backend == "avx2") {
    if (!kernels::backend_available(kernels::Backend::kAvx2)) {
      throw ValidationError("avx2 backend not available on this machine");
    }
    opts.backend = kernels::Backend::kAvx2;
  } else if (!a.backend.empty()) {
    throw ValidationError("--backend must be scalar or avx2");
  }
  const Palette palette = parse_palette(a.palette);
  const ExitDepthField field = sample_lambda_set(lambda, spec, Window{w[0], w[1], w[2], w[3]},
                                                 static_cast<int>(res[0]),
                                                 static_cast<int>(res[1]), a.depth, opts);
  if (!a.pgm.empty()) write_field_pgm16(field, a.pgm);
  if (!a.csv.empty()) write_field_csv(field, a.csv);
  if (!a.ppm.empty()) render_field(field, palette, a.ppm);
  std::size_t survivors = 0;
  for (int iy = 0; iy < field.ny; ++iy) {
    for (int ix = 0; ix < field.nx; ++ix) survivors += field.survivor(ix, iy) ? 1 : 0;
  }
  std::cout << "survivors " << survivors << " of " << field.conservative.size() << " at depth "
            << field.depth << '\n';
  return kExitOk;
}

// certify ----------------------------------------------------------------

struct CertifyArgs {
  std::string lambda, set, json;
  double delta = 0.5;
  double c = 1.0;
  double distortion = kDefaultDistortion;
  std::int64_t m = 0;
  int l0 = 2;
  int levels = 5;
  std::int64_t rmax = 30;
  bool positive_only = false;
};

int run_certify(const CertifyArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const ThinSetSpec spec = ThinSetSpec::parse(a.set);
  if (!(a.delta > 0.0 && a.delta < 1.0)) throw ValidationError("--delta must lie in (0, 1)");
  GeometryOptions go;
  if (a.m > 0) go.M = a.m;
  go.r_max = a.rmax;
  const InducedGeometry g = negative_geometry(lambda, a.c, a.l0, a.levels, go);
  if (a.rmax < g.M) throw ValidationError("--rmax must be >= M");
  const ContractionCertificate cert =
      verify_contraction(lambda, spec, g, a.delta, RRange{g.M, a.rmax, !a.positive_only}, a.distortion);
  if (!a.json.empty()) write_certificate_json(cert, a.json);
  std::cout << "M " << cert.M << ", delta " << fmt(cert.delta) << ", max_sum " << fmt(cert.max_sum)
            << ": " << (cert.pass ? "pass" : "not achieved") << " (" << cert.note << ")\n";
  return cert.pass ? kExitOk : kExitNotAchieved;
}

// boxdim -----------------------------------------------------------------

struct BoxdimArgs {
  std::string points, scales, json;
  bool shift = false;
};

std::vector<Complex> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<Complex> out;
  std::string line;
  std::size_t col_x = 0;
  std::size_t col_y = 1;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> f = split(line, ',');
    if (first) {
      first = false;
      bool header = false;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == "re" || f[i] == "x") { col_x = i; header = true; }
        if (f[i] == "im" || f[i] == "y") { col_y = i; header = true; }
      }
      if (header) continue;
    }
    if (f.size() <= std::max(col_x, col_y)) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": too few columns");
    }
    out.emplace_back(to_double(f[col_x], "point"), to_double(f[col_y], "point"));
  }
  return out;
}

int run_boxdim(const BoxdimArgs& a) {
  const std::vector<std::string> s = split(a.scales, ':');
  if (s.size() != 3) throw ValidationError("--scales must be E0:E1:FACTOR");
  const std::vector<double> eps = geometric_scales(to_double(s[0], "--scales"),
                                                   to_double(s[1], "--scales"),
                                                   to_double(s[2], "--scales"));
  BoxCountOptions opts;
  opts.half_shift = a.shift;
  const BoxCountResult r = box_count(read_points(a.points), eps, opts);
  if (!a.json.empty()) {
    auto out = open_out(a.json);
    write_boxcount_json(r, out);
    if (!out) throw IoError("write failed for '" + a.json + "'");
  }
  std::cout << "box-count slope " << fmt(r.slope) << " (r2 " << fmt(r.r2) << ", " << eps.size()
            << " scales)\n";
  for (const std::string& w : r.warnings) std::cout << "warning: " << w << '\n';
  return kExitOk;
}

// searchbound ------------------------------------------------------------

struct SearchArgs {
  std::string lambda, set, delta_grid, m_grid, l0_grid, json;
  double c = 1.0;
  std::int64_t r_span = 20;
  bool negative = false;
};

int run_searchbound(const SearchArgs& a) {
  const Complex lambda = complex_arg(a.lambda, "--lambda");
  const ThinSetSpec spec = ThinSetSpec::parse(a.set);
  const std::vector<double> deltas = numbers(a.delta_grid, "--delta-grid");
  std::vector<std::int64_t> ms;
  for (const double m : numbers(a.m_grid, "--m-grid")) {
    if (m != std::floor(m) || std::fabs(m) > 1e15) throw ValidationError("--m-grid needs integers");
    ms.push_back(static_cast<std::int64_t>(m));
  }
  std::vector<int> l0s;
  if (!a.l0_grid.empty()) {
    for (const double l : numbers(a.l0_grid, "--l0-grid")) {
      if (l != std::floor(l) || std::fabs(l) > 1e6) throw ValidationError("--l0-grid needs integers");
      l0s.push_back(static_cast<int>(l));
    }
  }
  SearchOptions opts;
  opts.c = a.c;
  opts.r_span = a.r_span;
  opts.negative = a.negative;
  const DimensionReport rep = dimension_bound_search(lambda, spec, deltas, ms, l0s, opts);
  if (!a.json.empty()) {
    auto out = open_out(a.json);
    write_report_json(rep, out);
    if (!out) throw IoError("write failed for '" + a.json + "'");
  }
  if (rep.bound_achieved) {
    std::cout << "best certified 1+delta " << fmt(*rep.bound_achieved) << " at M "
              << rep.certificate->M << '\n';
  } else {
    std::cout << "no certificate in grid\n";
  }
  return rep.bound_achieved ? kExitOk : kExitNotAchieved;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of z -> lambda e^z: orbits, rays, Lambda_W samples, certificates"};
  app.require_subcommand(1);

  OrbitArgs orbit;
  auto* c_orbit = app.add_subcommand("orbit", "iterate a point");
  c_orbit->add_option("--lambda", orbit.lambda, "RE,IM")->required();
  c_orbit->add_option("--z", orbit.z, "RE,IM")->required();
  c_orbit->add_option("--steps", orbit.steps)->required();
  c_orbit->add_option("--csv", orbit.csv);

  SupergrowthArgs sg;
  auto* c_sg = app.add_subcommand("supergrowth", "check alpha_{n+1} >= c e^{alpha_n}");
  c_sg->add_option("--lambda", sg.lambda, "RE,IM")->required();
  c_sg->add_option("--c", sg.c)->required();
  c_sg->add_option("--steps", sg.steps)->required();
  c_sg->add_option("--json", sg.json);

  RayArgs ray;
  auto* c_ray = app.add_subcommand("ray", "trace a dynamic ray");
  c_ray->add_option("--lambda", ray.lambda, "RE,IM")->required();
  c_ray->add_option("--address", ray.address, "e.g. 0...const")->required();
  c_ray->add_option("--t", ray.t, "T0:T1:STEP")->required();
  c_ray->add_option("--depth", ray.depth)->required();
  c_ray->add_option("--csv", ray.csv);

  LambdaSetArgs ls;
  auto* c_ls = app.add_subcommand("lambdaset", "sample the exit-depth field");
  c_ls->add_option("--lambda", ls.lambda, "RE,IM")->required();
  c_ls->add_option("--set", ls.set, "strip:A,B or sym:P")->required();
  c_ls->add_option("--window", ls.window, "X0,Y0,X1,Y1")->required();
  c_ls->add_option("--res", ls.res, "NX,NY")->required();
  c_ls->add_option("--depth", ls.depth)->required();
  c_ls->add_option("--pgm", ls.pgm, "16-bit exit-depth image");
  c_ls->add_option("--csv", ls.csv);
  c_ls->add_option("--ppm", ls.ppm, "rendered 8-bit image");
  c_ls->add_option("--palette", ls.palette, "gray, mask, fire, ocean");
  c_ls->add_option("--backend", ls.backend, "scalar or avx2");

  CertifyArgs cf;
  auto* c_cf = app.add_subcommand("certify", "contraction certificate");
  c_cf->add_option("--lambda", cf.lambda, "RE,IM")->required();
  c_cf->add_option("--set", cf.set)->required();
  c_cf->add_option("--delta", cf.delta)->required();
  c_cf->add_option("--m", cf.m, "default floor(alpha_l0)+1");
  c_cf->add_option("--l0", cf.l0)->required();
  c_cf->add_option("--rmax", cf.rmax)->required();
  c_cf->add_option("--c", cf.c, "supergrowth constant");
  c_cf->add_option("--levels", cf.levels);
  c_cf->add_option("--distortion", cf.distortion);
  c_cf->add_flag("--positive-only", cf.positive_only);
  c_cf->add_option("--json", cf.json);

  BoxdimArgs bd;
  auto* c_bd = app.add_subcommand("boxdim", "box-counting slope of a point file");
  c_bd->add_option("--points", bd.points, "CSV with re,im (or x,y) columns")->required();
  c_bd->add_option("--scales", bd.scales, "E0:E1:FACTOR")->required();
  c_bd->add_flag("--shift", bd.shift, "anchor the grid half a box off");
  c_bd->add_option("--json", bd.json);

  SearchArgs sb;
  auto* c_sb = app.add_subcommand("searchbound", "scan (delta, M, l0) for a certificate");
  c_sb->add_option("--lambda", sb.lambda, "RE,IM")->required();
  c_sb->add_option("--set", sb.set)->required();
  c_sb->add_option("--delta-grid", sb.delta_grid)->required();
  c_sb->add_option("--m-grid", sb.m_grid)->required();
  c_sb->add_option("--l0-grid", sb.l0_grid);
  c_sb->add_option("--c", sb.c);
  c_sb->add_option("--r-span", sb.r_span);
  c_sb->add_flag("--negative", sb.negative);
  c_sb->add_option("--json", sb.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*c_orbit) return run_orbit(orbit);
    if (*c_sg) return run_supergrowth(sg);
    if (*c_ray) return run_ray(ray);
    if (*c_ls) return run_lambdaset(ls);
    if (*c_cf) return run_certify(cf);
    if (*c_bd) return run_boxdim(bd);
    if (*c_sb) return run_searchbound(sb);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kValidation:
      case ErrorKind::kDomain:
        return kExitValidation;
      case ErrorKind::kRange:
      case ErrorKind::kPrecision:
      case ErrorKind::kConvergence:
        return kExitRange;
      case ErrorKind::kIo:
        return kExitIo;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
