#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "expdyn/core_dynamics.hpp"
#include "expdyn/kernels.hpp"
#include "expdyn/thin_set.hpp"

namespace expdyn {

enum class MembershipStatus { kMember, kExit, kUndecided };

struct MembershipResult {
  MembershipStatus status = MembershipStatus::kMember;
  int depth = 0;                     // N for members; the deciding index otherwise
  std::optional<int> exit_index;     // j < N when status is kExit
  std::optional<Complex> exit_point; // native exit iterate
  std::optional<LogPolarComplex> exit_polar;
  bool precision_caveat = false;     // member only verified to `verified_depth`
  int verified_depth = 0;
  bool snapped_to_real = false;
  std::int32_t conservative_code = 0;  // exit-depth field encodings
  std::int32_t optimistic_code = 0;
};

// Checks f^n(z) in W for n = 0..N-1.
MembershipResult lambda_membership(Complex lambda, const ThinSetSpec& spec, Complex z, int depth);

struct Window {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

// Exit-depth field, row-major with iy = 0 the bottom row (Im = y0).
// Exit at index j is stored as j + 1; survivors as N + 1.
struct ExitDepthField {
  Window window;
  int nx = 0;
  int ny = 0;
  int depth = 0;
  std::vector<std::int32_t> conservative;  // undecided counts as exit
  std::vector<std::int32_t> optimistic;    // undecided counts as member

  Complex pixel(int ix, int iy) const;
  std::int32_t at(int ix, int iy) const {
    return conservative[static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) +
                        static_cast<std::size_t>(ix)];
  }
  bool survivor(int ix, int iy) const { return at(ix, iy) == depth + 1; }
};

Complex window_pixel(const Window& w, int nx, int ny, int ix, int iy);

struct SampleOptions {
  std::optional<kernels::Backend> backend;  // default: best available
  int workers = 0;                          // 0: EXPDYN_THREADS / hardware
};

ExitDepthField sample_lambda_set(Complex lambda, const ThinSetSpec& spec, const Window& window,
                                 int nx, int ny, int depth, const SampleOptions& options = {});

// Survivor points (conservative field).
std::vector<Complex> field_survivors(const ExitDepthField& field);

// CSV "ix,iy,re,im,exit_depth" in row-major order from the lower-left pixel.
void write_field_csv(const ExitDepthField& field, std::ostream& out);
void write_field_csv(const ExitDepthField& field, const std::string& path);
// 16-bit big-endian P5, first row = bottom row (iy = 0), depth clamped to 65535.
void write_field_pgm16(const ExitDepthField& field, std::ostream& out);
void write_field_pgm16(const ExitDepthField& field, const std::string& path);

enum class TrajectoryKind { kBounded, kEscaping, kUndecided };

struct TrajectoryClass {
  TrajectoryKind kind = TrajectoryKind::kUndecided;
  int evidence = 0;  // escape index, or the number of iterates checked
  double max_modulus = 0.0;
};

TrajectoryClass classify_trajectory(Complex lambda, Complex z, int steps, double R_bound = 1e3,
                                    double escape_log_modulus = 1e8);

const char* to_string(TrajectoryKind k);

struct ExpansionEstimate {
  bool has_samples = false;
  std::size_t survivors = 0;
  double gamma = 0.0;  // exp of the smallest per-sample growth slope
  double c = 0.0;      // largest c with |(f^j)'| >= c gamma^j over all survivors
  std::string note;
};

// Fits |(f^j)'(z)| >= c gamma^j, j = 1..n, over samples whose first n iterates
// stay in the closed disc of radius R.
ExpansionEstimate measure_expansion(Complex lambda, double R, const std::vector<Complex>& samples,
                                    int n);

}  // namespace expdyn
