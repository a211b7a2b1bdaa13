#include "expdyn/induced.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "expdyn/errors.hpp"
#include "expdyn/parallel.hpp"
#include "expdyn/symbolic.hpp"

namespace expdyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Image annuli up to this many columns are summed column by column.
constexpr double kExactColumns = 65536.0;
// Balls spanning more columns than this use the closed-form column sum.
constexpr std::int64_t kExactBallColumns = 4096;
constexpr int kSubGridX = 9;
constexpr int kSubGridY = 33;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_delta(double delta, const char* where) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError(std::string(where) + ": delta must lie in (0, 1)");
  }
}

// a + b for towers; a level-1 addend is folded in through its logarithm and
// anything smaller than the larger operand's resolution is dropped.
TowerReal tower_add(TowerReal a, TowerReal b) {
  if (a < b) std::swap(a, b);
  if (b.is_native()) return a.plus(b.to_double());
  const TowerReal la = a.log();
  const TowerReal lb = b.log();
  if (la.is_native() && lb.is_native()) {
    const double x = la.to_double();
    return TowerReal::exp_of(x + std::log1p(std::exp(lb.to_double() - x)));
  }
  return a;
}

TowerReal signed_to_tower(const SignedTower& s) {
  if (s.sign == 0) return TowerReal(0.0);
  if (s.sign > 0) return s.magnitude;
  const std::optional<double> v = s.to_native();
  if (!v) throw RangeError("negative real part beyond double range");
  return TowerReal(*v);
}

bool strip_meets(const ThinSetSpec& spec, double arg, std::int64_t k, double x_lo, double x_hi) {
  const double y_lo = strip_lower_edge(arg, k);
  const double y_hi = strip_upper_edge(arg, k);
  for (int i = 0; i < kSubGridX; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (kSubGridX - 1);
    for (int j = 0; j < kSubGridY; ++j) {
      const double y = y_lo + (y_hi - y_lo) * j / (kSubGridY - 1);
      if (spec.contains(Complex(x, y))) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<ColumnBlock> image_column_blocks(Complex lambda, const ThinSetSpec& spec,
                                             bool positive, double d_min, double L0, double delta,
                                             double exact_limit) {
  std::vector<ColumnBlock> out;
  const double L1 = L0 + 1.0;
  if (d_min > std::exp(L1)) return out;
  const double kappa = 1.0 + delta;
  if (std::exp(L1) <= exact_limit) {
    const double r0 = std::exp(L0);
    const auto d_hi = static_cast<std::int64_t>(std::floor(std::exp(L1)));
    for (auto d = static_cast<std::int64_t>(d_min); d <= d_hi; ++d) {
      const std::int64_t s = positive ? d : -d - 1;
      const std::int64_t n = spec.column_count(lambda, s);
      if (n == 0) continue;
      const double dd = static_cast<double>(d);
      const double H = spec.im_extent(dd + 1.0) + kTwoPi;
      // The column's rectangles must reach the inner circle.
      if (std::hypot(dd + 1.0, H) < r0) continue;
      const double m = std::max(r0, dd);
      out.push_back({dd, std::log(static_cast<double>(n)) - kappa * std::log(m)});
    }
    return out;
  }
  const bool strip = spec.strip_bounds().has_value();
  if (!strip && L1 > 700.0) {
    throw RangeError("image columns beyond double range need a strip set");
  }
  // Near zone: columns left of the inner circle whose rectangles still reach it.
  const double H = strip ? spec.im_extent(0.0) + kTwoPi
                         : spec.im_extent(std::exp(L0) + 1.0) + kTwoPi;
  const double log_d_min = std::log(std::max(d_min, 1.0));
  if (log_d_min < L0) {
    const double r0 = std::exp(L0);
    const double lo = std::max(d_min, r0 - H - 1.0);
    double count = H + 2.0;
    std::int64_t n = 0;
    if (strip) {
      n = spec.max_column_count(lambda, 0.0, 1.0);
    } else {
      count = std::min(count, r0 - lo + 1.0);
      n = spec.max_column_count(lambda, lo, r0 + 1.0);
    }
    if (n > 0) out.push_back({lo, std::log(count * static_cast<double>(n)) - kappa * L0});
  }
  // Far zone: d in [A, B], sum d^{-kappa} <= A^{-kappa} + (A^{-delta} - B^{-delta})/delta.
  const double LA = std::max(L0, log_d_min);
  const double step = strip ? kInf : std::log(2.0);
  for (double la = LA; la < L1; la += step) {
    const double lb = std::min(la + step, L1);
    const std::int64_t n = strip ? spec.max_column_count(lambda, 0.0, 1.0)
                                 : spec.max_column_count(lambda, std::exp(la), std::exp(lb) + 1.0);
    if (n > 0) {
      const double inner = std::exp(-la) + (-std::expm1(-delta * (lb - la))) / delta;
      out.push_back({std::exp(la), std::log(static_cast<double>(n)) - delta * la + std::log(inner)});
    }
  }
  return out;
}

bool ZMFamily::contains(const RectangleIndex& q) const {
  return std::binary_search(rectangles.begin(), rectangles.end(), q,
                            [](const RectangleIndex& a, const RectangleIndex& b) {
                              return a.r != b.r ? a.r < b.r : a.k < b.k;
                            });
}

std::vector<std::int64_t> zm_column(const ThinSetSpec& spec, Complex lambda, std::int64_t M,
                                    std::int64_t r) {
  std::vector<std::int64_t> ks;
  if (r > -M && r < M) return ks;
  const double arg = principal_arg(lambda);
  if (const auto b = spec.strip_bounds()) {
    for (std::int64_t k = strip_index_of_imag(arg, b->first);
         k <= strip_index_of_imag(arg, b->second); ++k) {
      ks.push_back(k);
    }
    return ks;
  }
  const double x_lo = static_cast<double>(r);
  const double x_hi = r >= 0 ? static_cast<double>(r + 1) : std::min(x_lo + 1.0, -static_cast<double>(M));
  const double h = spec.im_extent(std::max(std::fabs(x_lo), std::fabs(x_lo + 1.0)));
  for (std::int64_t k = strip_index_of_imag(arg, -h); k <= strip_index_of_imag(arg, h); ++k) {
    if (strip_meets(spec, arg, k, x_lo, x_hi)) ks.push_back(k);
  }
  return ks;
}

ZMFamily build_zm(const ThinSetSpec& spec, Complex lambda, std::int64_t M, std::int64_t r_max) {
  if (M < 1) throw ValidationError("build_zm: M must be >= 1");
  if (r_max <= M) throw ValidationError("build_zm: r_max must exceed M");
  ZMFamily family;
  family.M = M;
  family.r_max = r_max;
  family.sampled = !spec.strip_bounds().has_value();
  auto add_column = [&](std::int64_t r) {
    const auto ks = zm_column(spec, lambda, M, r);
    if (ks.empty()) return;
    family.per_column_counts[r] = static_cast<std::int64_t>(ks.size());
    for (const std::int64_t k : ks) family.rectangles.push_back({k, r});
  };
  for (std::int64_t r = -r_max; r <= -M; ++r) add_column(r);
  for (std::int64_t r = M; r <= r_max; ++r) add_column(r);
  return family;
}

double log_image_sum(Complex lambda, const ThinSetSpec& spec, std::int64_t r, double delta,
                     std::int64_t M) {
  check_delta(delta, "log_image_sum");
  if (M < 1) throw ValidationError("log_image_sum: M must be >= 1");
  if (lambda == Complex(0.0, 0.0)) throw ValidationError("lambda must be nonzero");
  const double L0 = std::log(std::abs(lambda)) + static_cast<double>(r);
  double acc = -kInf;
  for (const bool positive : {true, false}) {
    const double d_min = static_cast<double>(positive ? M : M - 1);
    for (const ColumnBlock& b :
         image_column_blocks(lambda, spec, positive, d_min, L0, delta, kExactColumns)) {
      acc = log_add(acc, b.log_weight);
    }
  }
  return acc;
}

double positive_sum(Complex lambda, const ThinSetSpec& spec, const RectangleIndex& rect,
                    double delta, std::int64_t M) {
  if (M < 1 || rect.r < M) throw ValidationError("positive_sum: need r >= M >= 1");
  return std::exp(log_image_sum(lambda, spec, rect.r, delta, M));
}

std::optional<int> InducedGeometry::level_for_column(std::int64_t r) const {
  if (r > -M) return std::nullopt;
  // Column r covers -Re in (x - 1, x].
  const TowerReal x(-static_cast<double>(r));
  const TowerReal x_minus(-static_cast<double>(r) - 1.0);
  for (int l = l0; l <= l0 + levels; ++l) {
    const TowerReal& t = band_depth[static_cast<std::size_t>(l - l0)];
    const TowerReal& t_next = band_depth[static_cast<std::size_t>(l - l0 + 1)];
    if (t < x && t_next > x_minus) return l;
  }
  return std::nullopt;
}

InducedGeometry negative_geometry(Complex lambda, double c, int l0, int levels,
                                  const GeometryOptions& options) {
  if (!(c > 0.0)) throw ValidationError("negative_geometry: c must be positive");
  if (l0 < 1 || levels < 1) throw ValidationError("negative_geometry: need l0 >= 1, levels >= 1");
  if (options.r_max < 1) throw ValidationError("negative_geometry: r_max must be >= 1");
  const double abs_lambda = std::abs(lambda);
  if (!(abs_lambda > 0.0)) throw ValidationError("lambda must be nonzero");
  InducedGeometry g;
  g.lambda = lambda;
  g.c = c;
  g.D = c / (4.0 * abs_lambda);
  if (g.D > 0.25) throw ValidationError("negative_geometry: c must not exceed |lambda|");
  g.l0 = l0;
  g.levels = levels;
  g.r_max = options.r_max;

  const int horizon = l0 + levels + 1;
  const int steps = options.supergrowth_steps > 0 ? options.supergrowth_steps
                                                  : std::max(horizon + 1, 15);
  const SupergrowthReport sg = check_supergrowth(lambda, c, steps);
  if (!sg.holds) throw DomainError("negative_geometry: supergrowth fails: " + sg.failure_reason);

  const std::vector<OrbitPoint> beta = singular_orbit(lambda, horizon);
  g.orbit.push_back(LogPolarComplex{});
  std::vector<TowerReal> alpha{TowerReal(0.0)};
  for (const OrbitPoint& p : beta) {
    g.orbit.push_back(p.polar);
    alpha.push_back(signed_to_tower(p.real_part()));
  }
  const TowerReal& a_l0 = alpha[static_cast<std::size_t>(l0)];
  if (!a_l0.is_native()) {
    throw RangeError("negative_geometry: alpha_l0 exceeds double range; choose a smaller l0");
  }
  g.natural_M = static_cast<std::int64_t>(std::floor(a_l0.to_double())) + 1;
  g.M = options.M.value_or(g.natural_M);
  if (g.M < 1) throw ValidationError("negative_geometry: M must be >= 1");

  // t_l = log 4 + 1 - log D + l log|lambda| + alpha_0 + ... + alpha_{l-2}
  const double base = std::log(4.0) + 1.0 - std::log(g.D);
  for (int l = l0; l <= l0 + levels + 1; ++l) {
    TowerReal t(base + l * std::log(abs_lambda));
    for (int i = 0; i <= l - 2; ++i) t = tower_add(t, alpha[static_cast<std::size_t>(i)]);
    g.band_depth.push_back(t);
  }

  for (int l = l0; l <= l0 + levels; ++l) {
    Ball b;
    b.level = l;
    b.center = g.orbit[static_cast<std::size_t>(l)];
    b.log_radius = b.center.log_modulus.plus(std::log(g.D));
    const LogPolarComplex& next = g.orbit[static_cast<std::size_t>(l + 1)];
    const auto zn = b.center.to_native();
    const auto zn1 = next.to_native();
    if (zn && zn1) {
      b.disjoint_from_next = std::abs(*zn1 - *zn) > g.D * (std::abs(*zn) + std::abs(*zn1));
    } else {
      b.disjoint_from_next = next.log_modulus.plus(std::log1p(-g.D)) >
                             b.center.log_modulus.plus(std::log1p(g.D));
    }
    g.balls.push_back(b);
  }

  for (std::int64_t r = -options.r_max; r <= -g.M; ++r) {
    const std::optional<int> l = g.level_for_column(r);
    if (!l) {
      if (r == -g.M) {
        throw ValidationError("negative_geometry: M leaves the columns next to -M uncovered");
      }
      throw ValidationError("negative_geometry: bands stop before column " + std::to_string(r) +
                            "; raise the level count");
    }
    g.v_assignment[r] = *l;
  }
  return g;
}

InducedImage induced_apply(const InducedGeometry& geometry, const ThinSetSpec& spec, Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw ValidationError("induced_apply: non-finite point");
  }
  if (std::fabs(z.real()) > 9e15) throw RangeError("induced_apply: column index out of range");
  const auto r = static_cast<std::int64_t>(std::floor(z.real()));
  const std::int64_t k = strip_index(geometry.lambda, z);
  const auto ks = zm_column(spec, geometry.lambda, geometry.M, r);
  if (std::find(ks.begin(), ks.end(), k) == ks.end()) {
    throw DomainError("induced_apply: the rectangle of z is not in Z_M");
  }
  int iterates = 1;
  if (r < 0) {
    const std::optional<int> l = geometry.level_for_column(r);
    if (!l) throw DomainError("induced_apply: no level covers this column");
    iterates = *l + 2;
  }
  const OrbitStepper stepper(geometry.lambda);
  OrbitPoint p = stepper.start(z);
  for (int i = 0; i < iterates; ++i) p = stepper.step(p);
  InducedImage out;
  out.image = p.polar;
  out.iterates_used = iterates;
  if (p.native) out.native = p.z;
  return out;
}

double log_negative_sum(const InducedGeometry& geometry, const ThinSetSpec& spec, int level,
                        double delta, double distortion) {
  check_delta(delta, "log_negative_sum");
  if (!(distortion >= 1.0)) throw ValidationError("distortion allowance must be >= 1");
  if (level < geometry.l0 || level > geometry.l0 + geometry.levels) {
    throw ValidationError("log_negative_sum: level outside the geometry");
  }
  const Ball& b = geometry.ball(level);
  const double first_leg =
      (1.0 + delta) * std::log(4.0 * std::exp(1.0) * distortion / geometry.D);
  const auto center = b.center.to_native();
  if (!center || std::abs(*center) > 1e300) {
    if (!(std::cos(b.center.argument) > geometry.D)) {
      throw RangeError("log_negative_sum: ball B_l reaches into the left half-plane");
    }
    // Every covering rectangle sits beyond e^{709} columns; the sum underflows
    // any double logarithm.
    return -kInf;
  }
  const double arg = principal_arg(geometry.lambda);
  const double rho = geometry.D * std::abs(*center);
  const double x_lo = center->real() - rho;
  const double x_hi = center->real() + rho;
  const double rows = static_cast<double>(strip_index_of_imag(arg, center->imag() + rho) -
                                          strip_index_of_imag(arg, center->imag() - rho) + 1);
  if (std::fabs(x_lo) > 9e15 || std::fabs(x_hi) > 9e15) {
    throw RangeError("log_negative_sum: ball columns exceed the column index range");
  }
  const auto c_lo = static_cast<std::int64_t>(std::floor(x_lo));
  const auto c_hi = static_cast<std::int64_t>(std::floor(x_hi));
  double acc = -kInf;
  if (c_hi - c_lo <= kExactBallColumns) {
    for (std::int64_t col = c_lo; col <= c_hi; ++col) {
      acc = log_add(acc, log_image_sum(geometry.lambda, spec, col, delta, geometry.M));
    }
  } else {
    if (!spec.strip_bounds()) {
      throw RangeError("log_negative_sum: wide balls are only summed for strip sets");
    }
    // Sum over all columns >= c_lo of the per-column closed form
    // 2n[(H+3) e^{-(1+delta)L} + e^{-delta L}(1 - e^{-delta})/delta].
    const double n = static_cast<double>(spec.max_column_count(geometry.lambda, 0.0, 1.0));
    const double H = spec.im_extent(0.0) + kTwoPi;
    const double L = std::log(std::abs(geometry.lambda)) + static_cast<double>(c_lo);
    const double kappa = 1.0 + delta;
    const double a = std::log(2.0 * n * (H + 3.0)) - kappa * L - std::log(-std::expm1(-kappa));
    const double bterm = std::log(2.0 * n) - delta * L - std::log(delta);
    acc = log_add(a, bterm);
  }
  return first_leg + std::log(rows) + acc;
}

ContractionCertificate verify_contraction(Complex lambda, const ThinSetSpec& spec,
                                          const InducedGeometry& geometry, double delta,
                                          const RRange& range, double distortion) {
  check_delta(delta, "verify_contraction");
  if (lambda != geometry.lambda) throw ValidationError("verify_contraction: geometry built for another lambda");
  if (range.lo < 1 || range.hi < range.lo) throw ValidationError("verify_contraction: bad r range");
  if (!(distortion >= 1.0)) throw ValidationError("distortion allowance must be >= 1");
  const std::int64_t M = geometry.M;
  const std::int64_t first = std::max(range.lo, M);
  if (first > range.hi) throw ValidationError("verify_contraction: r range lies below M");

  ContractionCertificate cert;
  cert.lambda = lambda;
  cert.c = geometry.c;
  cert.delta = delta;
  cert.M = M;
  cert.l0 = geometry.l0;
  cert.r_range = range;
  cert.distortion = distortion;

  const auto columns = static_cast<std::size_t>(range.hi - first + 1);
  std::vector<double> logs(columns);
  std::vector<std::vector<std::int64_t>> ks(columns);
  parallel_for(columns, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const std::int64_t r = first + static_cast<std::int64_t>(i);
      ks[i] = zm_column(spec, lambda, M, r);
      if (!ks[i].empty()) logs[i] = log_image_sum(lambda, spec, r, delta, M);
    }
  });

  if (range.negative) {
    std::map<int, double> level_logs;
    for (std::int64_t r = -range.hi; r <= -first; ++r) {
      const auto kcol = zm_column(spec, lambda, M, r);
      if (kcol.empty()) continue;
      const std::optional<int> l = geometry.level_for_column(r);
      if (!l) throw RangeError("verify_contraction: no level covers column " + std::to_string(r));
      auto it = level_logs.find(*l);
      if (it == level_logs.end()) {
        it = level_logs.emplace(*l, log_negative_sum(geometry, spec, *l, delta, distortion)).first;
      }
      for (const std::int64_t k : kcol) {
        cert.per_rectangle.push_back({{k, r}, std::exp(it->second), it->second, *l});
      }
    }
  }
  for (std::size_t i = 0; i < columns; ++i) {
    const std::int64_t r = first + static_cast<std::int64_t>(i);
    for (const std::int64_t k : ks[i]) {
      cert.per_rectangle.push_back({{k, r}, std::exp(logs[i]), logs[i], -1});
    }
  }
  for (const RectangleBound& b : cert.per_rectangle) cert.max_sum = std::max(cert.max_sum, b.bound);
  cert.pass = cert.max_sum < 0.5;
  if (cert.pass) {
    cert.note = "passes modulo distortion allowance";
  } else if (cert.max_sum < 1.0) {
    cert.note = "certificate not achieved at this M, delta (inconclusive)";
  } else {
    cert.note = "certificate not achieved at this M, delta";
  }
  return cert;
}

void write_certificate_json(const ContractionCertificate& cert, std::ostream& out) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["lambda"] = {cert.lambda.real(), cert.lambda.imag()};
  j["c"] = cert.c;
  j["delta"] = cert.delta;
  j["M"] = cert.M;
  j["l0"] = cert.l0;
  j["r_range"] = {{"lo", cert.r_range.lo}, {"hi", cert.r_range.hi}, {"negative", cert.r_range.negative}};
  auto rects = nlohmann::ordered_json::array();
  for (const RectangleBound& b : cert.per_rectangle) {
    nlohmann::ordered_json e;
    e["k"] = b.rect.k;
    e["r"] = b.rect.r;
    e["bound"] = b.bound;
    if (std::isfinite(b.log_bound)) e["log_bound"] = b.log_bound;
    if (b.level >= 0) e["level"] = b.level;
    rects.push_back(std::move(e));
  }
  j["per_rectangle"] = std::move(rects);
  j["max_sum"] = cert.max_sum;
  j["pass"] = cert.pass;
  j["distortion_allowance"] = cert.distortion;
  j["note"] = cert.note;
  out << j.dump(2) << '\n';
}

void write_certificate_json(const ContractionCertificate& cert, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_certificate_json(cert, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace expdyn
