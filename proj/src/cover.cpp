#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "expdyn/errors.hpp"
#include "expdyn/induced.hpp"
#include "expdyn/symbolic.hpp"

namespace expdyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Parents whose image annulus reaches e^{kExpandLimit} are closed off with
// their own rectangle bound instead of being expanded.
constexpr double kExpandLimit = 40.0;
constexpr double kChildExactColumns = 64.0;

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

RectangleIndex rectangle_of(Complex lambda, Complex z) {
  if (std::fabs(z.real()) > 9e15) throw RangeError("column index out of range");
  return {strip_index(lambda, z), static_cast<std::int64_t>(std::floor(z.real()))};
}

}  // namespace

LogPolarComplex BranchCell::apply(const InducedGeometry& geometry, const ThinSetSpec& spec,
                                  Complex z) const {
  if (steps.empty()) return LogPolarComplex::from_native(z);
  Complex w = z;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (rectangle_of(geometry.lambda, w) != steps[i].rect) {
      throw DomainError("BranchCell: point left the branch at step " + std::to_string(i));
    }
    const InducedImage img = induced_apply(geometry, spec, w);
    if (img.iterates_used != steps[i].iterates) {
      throw DomainError("BranchCell: iterate count mismatch at step " + std::to_string(i));
    }
    if (i + 1 == steps.size()) return img.image;
    if (!img.native) throw RangeError("BranchCell: intermediate image beyond double range");
    w = *img.native;
  }
  return LogPolarComplex::from_native(w);
}

BranchCell branch_of(const InducedGeometry& geometry, const ThinSetSpec& spec, Complex z,
                     int depth) {
  if (depth < 0) throw ValidationError("branch_of: depth must be >= 0");
  BranchCell cell;
  Complex w = z;
  for (int i = 0; i < depth; ++i) {
    const RectangleIndex rect = rectangle_of(geometry.lambda, w);
    const InducedImage img = induced_apply(geometry, spec, w);
    cell.steps.push_back({rect, img.iterates_used});
    if (i + 1 == depth) break;
    if (!img.native) throw RangeError("branch_of: image beyond double range");
    w = *img.native;
  }
  return cell;
}

CoverResult cover_iterate(Complex lambda, const ThinSetSpec& spec,
                          const InducedGeometry& geometry, double delta, int depth_max,
                          std::size_t branch_cap, const CoverOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("cover_iterate: delta must lie in (0, 1)");
  if (depth_max < 0) throw ValidationError("cover_iterate: depth must be >= 0");
  if (branch_cap < 1) throw ValidationError("cover_iterate: branch cap must be >= 1");
  if (lambda != geometry.lambda) throw ValidationError("cover_iterate: geometry built for another lambda");
  const std::int64_t M = geometry.M;

  RectangleIndex start;
  if (options.start) {
    start = *options.start;
    const auto ks = zm_column(spec, lambda, M, start.r);
    if (std::find(ks.begin(), ks.end(), start.k) == ks.end()) {
      throw ValidationError("cover_iterate: start rectangle is not in Z_M");
    }
  } else {
    const auto ks = zm_column(spec, lambda, M, M);
    if (ks.empty()) throw ValidationError("cover_iterate: column M has no rectangle of Z_M");
    start = {ks.front(), M};
  }

  const double log_abs = std::log(std::abs(lambda));
  std::map<int, double> level_cache;
  auto level_log = [&](std::int64_t r) {
    const std::optional<int> l = geometry.level_for_column(r);
    if (!l) throw RangeError("cover_iterate: no level covers column " + std::to_string(r));
    auto it = level_cache.find(*l);
    if (it == level_cache.end()) {
      it = level_cache
               .emplace(*l, log_negative_sum(geometry, spec, *l, delta, options.distortion))
               .first;
    }
    return it->second;
  };

  // Largest per-rectangle bound over Z_M. The positive closed form decreases
  // in r once it applies, so a finite scan suffices.
  double log_s_max = -kInf;
  for (std::int64_t r = M; r <= M + 10000; ++r) {
    log_s_max = std::max(log_s_max, log_image_sum(lambda, spec, r, delta, M));
    if (r >= M + 64 && log_abs + static_cast<double>(r) > 12.0) break;
  }
  const std::optional<int> first_level = geometry.level_for_column(-M);
  if (!first_level) throw RangeError("cover_iterate: column -M has no level");
  for (int l = *first_level; l <= geometry.l0 + geometry.levels; ++l) {
    log_s_max = std::max(log_s_max, log_negative_sum(geometry, spec, l, delta, options.distortion));
  }

  const double log_base = (1.0 + delta) * std::log(kTwoPi + 1.0);
  CoverResult result;
  result.levels.push_back({0, std::exp(log_base), log_base, kTwoPi + 1.0, 1});

  std::vector<double> tail(static_cast<std::size_t>(depth_max) + 1, -kInf);
  auto absorb = [&](int n, double log_w) {
    for (int m = n; m <= depth_max; ++m) {
      tail[static_cast<std::size_t>(m)] =
          log_add(tail[static_cast<std::size_t>(m)], log_w + (m - n) * log_s_max);
    }
  };

  // Cells sharing their last column have identical subtrees; they are merged
  // with summed weight. A block of child columns is represented by its column
  // nearest the imaginary axis.
  std::map<std::int64_t, double> current{{start.r, 0.0}};
  for (int n = 1; n <= depth_max; ++n) {
    std::map<std::int64_t, double> next;
    for (const auto& [r, w] : current) {
      if (r < 0) {
        absorb(n, w + level_log(r));
        continue;
      }
      const double L0 = log_abs + static_cast<double>(r);
      if (L0 + 1.0 > kExpandLimit) {
        absorb(n, w + log_image_sum(lambda, spec, r, delta, M));
        continue;
      }
      for (const bool positive : {true, false}) {
        const double d_min = static_cast<double>(positive ? M : M - 1);
        for (const ColumnBlock& b :
             image_column_blocks(lambda, spec, positive, d_min, L0, delta, kChildExactColumns)) {
          const auto d = static_cast<std::int64_t>(std::ceil(b.d_lo));
          const std::int64_t s = positive ? d : -d - 1;
          auto it = next.find(s);
          if (it == next.end()) {
            next.emplace(s, w + b.log_weight);
          } else {
            it->second = log_add(it->second, w + b.log_weight);
          }
        }
      }
    }
    if (next.size() > branch_cap) {
      result.aborted = true;
      result.note = "branch cap exceeded at depth " + std::to_string(n);
      break;
    }
    double sum = tail[static_cast<std::size_t>(n)];
    for (const auto& [s, w] : next) sum = log_add(sum, w);
    const double log_total = log_base + sum;
    result.levels.push_back({n, std::exp(log_total), log_total,
                             (kTwoPi + 1.0) / std::ldexp(1.0, n), next.size()});
    current = std::move(next);
  }
  return result;
}

}  // namespace expdyn
