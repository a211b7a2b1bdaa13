#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "expdyn/core_dynamics.hpp"
#include "expdyn/symbolic.hpp"

namespace expdyn {

struct RaySample {
  double t = 0.0;
  Complex point;
  int depth = 0;
  double residual = 0.0;        // |trace(depth) - trace(depth + 5)|
  bool low_confidence = false;  // t < 2
};

struct Ray {
  ExternalAddress address;
  std::vector<RaySample> samples;
  int depth = 0;
  double residual = 0.0;  // max over samples
};

inline constexpr double kRayTolerance = 1e-10;
inline constexpr int kRayCheckExtraDepth = 5;

// Pulls the seed F^depth(t) + i(2 pi s_depth - Arg lambda) back along
// s_{depth-1}, ..., s_0 with F(t) = e^t - 1. No convergence check.
Complex pullback_point(Complex lambda, const ExternalAddress& s, double t, int depth);

// Traces g_s at the given t (strictly increasing, >= 1). ConvergenceError when
// depth and depth + 5 disagree by tol or more.
Ray trace_ray(Complex lambda, const ExternalAddress& s, const std::vector<double>& t_values,
              int depth, double tol = kRayTolerance);

// 2 pi s_0 - Arg lambda.
double ray_asymptote(Complex lambda, const ExternalAddress& s);

// |f(g_s(t)) - g_{shift s}(F(t))|.
double forward_invariance_defect(Complex lambda, const ExternalAddress& s, double t, int depth);

enum class LandingClass { kLanding, kAccumulating, kUndecided };

struct LandingReport {
  LandingClass cls = LandingClass::kUndecided;
  std::optional<Complex> landing_point;
  std::vector<double> t_used;          // t values whose trace converged
  std::vector<Complex> endpoints;
  double spread = 0.0;                 // diameter of the final window
};

struct LandingOptions {
  double tol = 1e-8;
  int window = 6;               // endpoints in the final window (5 gaps)
  double cauchy_factor = 2.0;
  double spread_threshold = 0.5;
};

// Heuristic: traces g_s at the decreasing t values and inspects the endpoints.
LandingReport landing_probe(Complex lambda, const ExternalAddress& s,
                            const std::vector<double>& t_decreasing, int depth,
                            const LandingOptions& options = {});

const char* to_string(LandingClass c);

// CSV "t,re,im,depth,residual", %.17g, LF.
void write_ray_csv(const Ray& ray, std::ostream& out);
void write_ray_csv(const Ray& ray, const std::string& path);

}  // namespace expdyn
