#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "expdyn/core_dynamics.hpp"
#include "expdyn/thin_set.hpp"

namespace expdyn {

// R^k_r = {r <= Re z < r + 1} intersected with the strip P_k.
struct RectangleIndex {
  std::int64_t k = 0;
  std::int64_t r = 0;
  friend auto operator<=>(const RectangleIndex&, const RectangleIndex&) = default;
};

struct ZMFamily {
  std::int64_t M = 1;
  std::int64_t r_max = 2;
  std::vector<RectangleIndex> rectangles;  // ordered by (r, k)
  std::map<std::int64_t, std::int64_t> per_column_counts;
  bool sampled = false;  // membership decided on a sub-grid (non-strip sets)

  bool contains(const RectangleIndex& q) const;
};

// Rectangles meeting W and {|Re z| >= M}, for M <= |r| <= r_max. Strip sets are
// decided exactly, other sets on a 9 x 33 sub-grid plus corners.
ZMFamily build_zm(const ThinSetSpec& spec, Complex lambda, std::int64_t M, std::int64_t r_max);

// Strips of Z_M in column r.
std::vector<std::int64_t> zm_column(const ThinSetSpec& spec, Complex lambda, std::int64_t M,
                                    std::int64_t r);

// Image columns of one side grouped into blocks: d_lo is the smallest distance
// |Re| of a block column to the imaginary axis, log_weight bounds
// sum n(s) (inf |zeta|)^{-(1+delta)} over the block. Columns are listed one by
// one while e^{L0+1} <= exact_limit.
struct ColumnBlock {
  double d_lo = 0.0;
  double log_weight = 0.0;
};

std::vector<ColumnBlock> image_column_blocks(Complex lambda, const ThinSetSpec& spec,
                                             bool positive, double d_min, double L0, double delta,
                                             double exact_limit);

// log of the column-aggregated bound on sum_Q sup |f'|^{-(1+delta)} over the
// rectangles Q of Z_M meeting the image of a column-r rectangle. r may be any
// integer here; -inf when nothing is hit.
double log_image_sum(Complex lambda, const ThinSetSpec& spec, std::int64_t r, double delta,
                     std::int64_t M);

// Upper bound for one positive-side rectangle (r >= M).
double positive_sum(Complex lambda, const ThinSetSpec& spec, const RectangleIndex& rect,
                    double delta, std::int64_t M);

struct Ball {
  int level = 0;
  LogPolarComplex center;  // beta_l
  TowerReal log_radius;    // log(D |beta_l|)
  bool disjoint_from_next = false;
};

struct InducedGeometry {
  Complex lambda;
  double c = 1.0;
  double D = 0.25;
  int l0 = 1;
  int levels = 0;           // balls for l0 .. l0 + levels
  std::int64_t M = 1;
  std::int64_t natural_M = 1;  // floor(alpha_{l0}) + 1
  std::int64_t r_max = 0;
  std::vector<Ball> balls;
  std::vector<LogPolarComplex> orbit;  // beta_0 .. beta_{l0+levels+1}
  // -Re of the band boundary for level l, l0 <= l <= l0 + levels + 1.
  std::vector<TowerReal> band_depth;
  std::map<std::int64_t, int> v_assignment;  // negative column -> level

  // Level for a negative column (computed past r_max too). nullopt when the
  // column lies beyond the last band.
  std::optional<int> level_for_column(std::int64_t r) const;
  const Ball& ball(int level) const { return balls.at(static_cast<std::size_t>(level - l0)); }
};

struct GeometryOptions {
  std::optional<std::int64_t> M;  // override; must keep every column -r_max..-M covered
  std::int64_t r_max = 1000;
  int supergrowth_steps = 0;      // 0: l0 + levels + 2
};

InducedGeometry negative_geometry(Complex lambda, double c, int l0, int levels,
                                  const GeometryOptions& options = {});

struct InducedImage {
  LogPolarComplex image;
  int iterates_used = 0;
  std::optional<Complex> native;
};

// F(z): f on the right, f^{l+2} on a level-l rectangle on the left.
InducedImage induced_apply(const InducedGeometry& geometry, const ThinSetSpec& spec, Complex z);

inline constexpr double kDefaultDistortion = 1.2;

// log of the bound for a level-l rectangle:
// (1+delta) log(4 e L_dist / D) + log sum over rectangles covering B_l.
double log_negative_sum(const InducedGeometry& geometry, const ThinSetSpec& spec, int level,
                        double delta, double distortion = kDefaultDistortion);

struct RRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;
  bool negative = false;  // also certify columns -hi..-lo
};

struct RectangleBound {
  RectangleIndex rect;
  double bound = 0.0;
  double log_bound = 0.0;
  int level = -1;  // negative side only
};

struct ContractionCertificate {
  Complex lambda;
  double c = 1.0;
  double delta = 0.5;
  std::int64_t M = 1;
  int l0 = 1;
  RRange r_range;
  double distortion = kDefaultDistortion;
  std::vector<RectangleBound> per_rectangle;
  double max_sum = 0.0;
  bool pass = false;
  std::string note;
};

ContractionCertificate verify_contraction(Complex lambda, const ThinSetSpec& spec,
                                          const InducedGeometry& geometry, double delta,
                                          const RRange& range,
                                          double distortion = kDefaultDistortion);

void write_certificate_json(const ContractionCertificate& cert, std::ostream& out);
void write_certificate_json(const ContractionCertificate& cert, const std::string& path);

// One step of a cover cell: the rectangle the point sits in and the iterate
// count F uses there.
struct BranchStep {
  RectangleIndex rect;
  int iterates = 1;
};

struct BranchCell {
  std::vector<BranchStep> steps;

  // Applies the composed branch; DomainError if a point leaves the recorded
  // rectangle.
  LogPolarComplex apply(const InducedGeometry& geometry, const ThinSetSpec& spec,
                        Complex z) const;
};

// Cell along the orbit of z under F.
BranchCell branch_of(const InducedGeometry& geometry, const ThinSetSpec& spec, Complex z,
                     int depth);

struct CoverLevel {
  int depth = 0;
  double total = 0.0;   // upper bound on sum (diam K)^{1+delta}
  double log_total = 0.0;
  double budget = 0.0;  // (2 pi + 1) / 2^n
  std::size_t groups = 0;
};

struct CoverOptions {
  std::optional<RectangleIndex> start;  // default: R^k_M with the smallest k in Z_M
  double distortion = kDefaultDistortion;
};

struct CoverResult {
  std::vector<CoverLevel> levels;
  bool aborted = false;
  std::string note;
};

CoverResult cover_iterate(Complex lambda, const ThinSetSpec& spec,
                          const InducedGeometry& geometry, double delta, int depth_max,
                          std::size_t branch_cap, const CoverOptions& options = {});

}  // namespace expdyn
