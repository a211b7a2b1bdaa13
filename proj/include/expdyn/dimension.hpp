#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "expdyn/core_dynamics.hpp"
#include "expdyn/induced.hpp"
#include "expdyn/kernels.hpp"
#include "expdyn/lambda_set.hpp"
#include "expdyn/thin_set.hpp"

namespace expdyn {

struct BoxCountResult {
  std::vector<double> epsilons;
  std::vector<std::int64_t> counts;
  double slope = 0.0;  // least squares of log N against log(1/eps)
  double r2 = 0.0;
  std::vector<std::string> warnings;
};

struct BoxCountOptions {
  std::optional<Complex> origin;  // grid anchor; default: lower-left of the points
  bool half_shift = false;        // move the anchor by -eps/2 at every scale
  std::optional<kernels::Backend> backend;
};

// epsilons must be strictly decreasing.
BoxCountResult box_count(const std::vector<Complex>& points, const std::vector<double>& epsilons,
                         const BoxCountOptions& options = {});

// eps0, eps0 * q, ... down to eps1 (q < 1; q > 1 is read as 1/q).
std::vector<double> geometric_scales(double eps0, double eps1, double factor);

struct SearchOptions {
  double c = 1.0;
  std::int64_t r_span = 20;   // positive range r in [M, M + r_span]
  bool negative = false;      // include the negative side (needs l0_grid)
  int levels = 5;
  std::int64_t r_max = 1000;
  double distortion = kDefaultDistortion;
};

struct SearchEntry {
  double delta = 0.0;
  std::int64_t M = 0;
  std::optional<int> l0;
  std::optional<double> max_sum;
  bool pass = false;
  std::string note;
};

struct DimensionReport {
  std::optional<BoxCountResult> boxcount;
  std::optional<ContractionCertificate> certificate;  // best passing one
  std::optional<double> bound_achieved;                // 1 + delta of it
  std::vector<SearchEntry> scanned;
  std::string note;
  // run parameters
  Complex lambda;
  std::string set;
  std::vector<double> delta_grid;
  std::vector<std::int64_t> m_grid;
  std::vector<int> l0_grid;
};

DimensionReport dimension_bound_search(Complex lambda, const ThinSetSpec& spec,
                                       const std::vector<double>& delta_grid,
                                       const std::vector<std::int64_t>& m_grid,
                                       const std::vector<int>& l0_grid,
                                       const SearchOptions& options = {});

void write_boxcount_json(const BoxCountResult& result, std::ostream& out);
void write_report_json(const DimensionReport& report, std::ostream& out);

enum class Palette { kGray, kMask, kFire, kOcean };

Palette parse_palette(const std::string& name);
const char* to_string(Palette p);

// P5 for gray/mask, P6 otherwise. First written row is iy = 0 (window bottom);
// depth N + 1 maps to the top of the ramp.
void render_field(const ExitDepthField& field, Palette palette, std::ostream& out);
void render_field(const ExitDepthField& field, Palette palette, const std::string& path);

}  // namespace expdyn
