#include "expdyn/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "expdyn/errors.hpp"
#include "kernels/field_kernel.hpp"

namespace expdyn {
namespace {

using ojson = nlohmann::ordered_json;

ojson boxcount_to_json(const BoxCountResult& r) {
  ojson j;
  j["epsilons"] = r.epsilons;
  j["counts"] = r.counts;
  j["slope"] = r.slope;
  j["r2"] = r.r2;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

BoxCountResult box_count(const std::vector<Complex>& points, const std::vector<double>& epsilons,
                         const BoxCountOptions& options) {
  if (points.empty()) throw ValidationError("box_count: no points");
  if (epsilons.empty()) throw ValidationError("box_count: no scales");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) {
      throw ValidationError("box_count: scales must be positive and finite");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw ValidationError("box_count: degenerate scales, epsilons must be strictly decreasing");
    }
  }
  std::vector<double> xs(points.size());
  std::vector<double> ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].real();
    ys[i] = points[i].imag();
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw ValidationError("box_count: non-finite point");
    }
  }
  const Complex origin = options.origin.value_or(
      Complex(*std::min_element(xs.begin(), xs.end()), *std::min_element(ys.begin(), ys.end())));
  const kernels::Backend backend = options.backend.value_or(kernels::default_backend());

  BoxCountResult result;
  result.epsilons = epsilons;
  std::vector<std::int64_t> keys(points.size());
  for (const double eps : epsilons) {
    const double shift = options.half_shift ? 0.5 * eps : 0.0;
    if (!kernels::box_keys(backend, xs.data(), ys.data(), xs.size(), origin.real() - shift,
                           origin.imag() - shift, eps, keys.data())) {
      throw RangeError("box_count: grid index exceeds 32 bits at eps = " + std::to_string(eps));
    }
    std::sort(keys.begin(), keys.end());
    result.counts.push_back(
        static_cast<std::int64_t>(std::unique(keys.begin(), keys.end()) - keys.begin()));
  }

  const std::size_t n = epsilons.size();
  if (n < 3) result.warnings.push_back("fewer than 3 scales");
  if (epsilons.front() / epsilons.back() < 10.0) {
    result.warnings.push_back("scales span less than one decade");
  }
  if (points.size() < 100) result.warnings.push_back("fewer than 100 points");
  if (n < 2) {
    result.r2 = 1.0;
    return result;
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += -std::log(epsilons[i]);
    my += std::log(static_cast<double>(result.counts[i]));
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = -std::log(epsilons[i]) - mx;
    const double dy = std::log(static_cast<double>(result.counts[i])) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  result.slope = sxy / sxx;
  result.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return result;
}

std::vector<double> geometric_scales(double eps0, double eps1, double factor) {
  if (!(eps0 > 0.0) || !(eps1 > 0.0) || !(eps1 <= eps0)) {
    throw ValidationError("scales: need eps0 >= eps1 > 0");
  }
  if (!(factor > 0.0) || factor == 1.0 || !std::isfinite(factor)) {
    throw ValidationError("scales: factor must be positive and != 1");
  }
  const double q = factor < 1.0 ? factor : 1.0 / factor;
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double e = eps0 * std::pow(q, i);
    if (e < eps1 * (1.0 - 1e-9)) break;
    out.push_back(e);
    if (out.size() > 200) throw ValidationError("scales: more than 200 scales");
  }
  return out;
}

DimensionReport dimension_bound_search(Complex lambda, const ThinSetSpec& spec,
                                       const std::vector<double>& delta_grid,
                                       const std::vector<std::int64_t>& m_grid,
                                       const std::vector<int>& l0_grid,
                                       const SearchOptions& options) {
  if (delta_grid.empty()) throw ValidationError("dimension_bound_search: empty delta grid");
  if (m_grid.empty()) throw ValidationError("dimension_bound_search: empty M grid");
  if (options.negative && l0_grid.empty()) {
    throw ValidationError("dimension_bound_search: the negative side needs an l0 grid");
  }
  for (const double d : delta_grid) {
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("dimension_bound_search: delta outside (0, 1)");
  }
  for (const std::int64_t m : m_grid) {
    if (m < 1) throw ValidationError("dimension_bound_search: M must be >= 1");
  }
  if (options.r_span < 0) throw ValidationError("dimension_bound_search: negative r span");
  const SupergrowthReport sg = check_supergrowth(lambda, options.c);
  if (!sg.holds) throw DomainError("dimension_bound_search: supergrowth fails: " + sg.failure_reason);

  DimensionReport report;
  report.lambda = lambda;
  report.set = spec.descriptor();
  report.delta_grid = delta_grid;
  report.m_grid = m_grid;
  report.l0_grid = l0_grid;

  auto consider = [&](double delta, std::int64_t M, std::optional<int> l0,
                      const InducedGeometry& g) {
    const RRange range{M, M + options.r_span, options.negative};
    ContractionCertificate cert = verify_contraction(lambda, spec, g, delta, range, options.distortion);
    report.scanned.push_back({delta, M, l0, cert.max_sum, cert.pass, cert.note});
    if (!cert.pass) return;
    const bool better = !report.certificate || delta < report.certificate->delta ||
                        (delta == report.certificate->delta && M < report.certificate->M);
    if (better) {
      report.bound_achieved = 1.0 + delta;
      report.certificate = std::move(cert);
    }
  };

  for (const std::int64_t M : m_grid) {
    for (const double delta : delta_grid) {
      if (!options.negative) {
        InducedGeometry g;
        g.lambda = lambda;
        g.c = options.c;
        g.D = options.c / (4.0 * std::abs(lambda));
        g.M = M;
        g.natural_M = M;
        g.l0 = 0;
        consider(delta, M, std::nullopt, g);
        continue;
      }
      for (const int l0 : l0_grid) {
        InducedGeometry g;
        try {
          GeometryOptions go;
          go.M = M;
          go.r_max = std::max(options.r_max, M + options.r_span);
          g = negative_geometry(lambda, options.c, l0, options.levels, go);
        } catch (const ValidationError& e) {
          report.scanned.push_back({delta, M, l0, std::nullopt, false, e.what()});
          continue;
        } catch (const RangeError& e) {
          report.scanned.push_back({delta, M, l0, std::nullopt, false, e.what()});
          continue;
        }
        consider(delta, M, l0, g);
      }
    }
  }
  report.note = report.certificate
                    ? "smallest passing 1+delta in the scanned grid; a cover-sum bound, not a "
                      "Hausdorff dimension"
                    : "no certificate in grid";
  return report;
}

void write_boxcount_json(const BoxCountResult& result, std::ostream& out) {
  ojson j;
  j["format_version"] = 1;
  j["boxcount"] = boxcount_to_json(result);
  out << j.dump(2) << '\n';
}

void write_report_json(const DimensionReport& report, std::ostream& out) {
  ojson j;
  j["format_version"] = 1;
  j["lambda"] = {report.lambda.real(), report.lambda.imag()};
  j["set"] = report.set;
  j["delta_grid"] = report.delta_grid;
  j["m_grid"] = report.m_grid;
  j["l0_grid"] = report.l0_grid;
  if (report.boxcount) j["boxcount"] = boxcount_to_json(*report.boxcount);
  auto scanned = ojson::array();
  for (const SearchEntry& e : report.scanned) {
    ojson s;
    s["delta"] = e.delta;
    s["M"] = e.M;
    if (e.l0) s["l0"] = *e.l0;
    if (e.max_sum) s["max_sum"] = *e.max_sum;
    s["pass"] = e.pass;
    s["note"] = e.note;
    scanned.push_back(std::move(s));
  }
  j["scanned"] = std::move(scanned);
  if (report.certificate) {
    const ContractionCertificate& c = *report.certificate;
    j["certificate"] = {{"delta", c.delta}, {"M", c.M}, {"l0", c.l0},
                        {"r_range", {c.r_range.lo, c.r_range.hi}},
                        {"negative_side", c.r_range.negative}, {"max_sum", c.max_sum},
                        {"pass", c.pass}, {"distortion_allowance", c.distortion}};
  } else {
    j["certificate"] = nullptr;
  }
  j["bound_achieved"] = report.bound_achieved ? ojson(*report.bound_achieved) : ojson(nullptr);
  j["note"] = report.note;
  out << j.dump(2) << '\n';
}

}  // namespace expdyn
