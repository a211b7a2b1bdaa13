#pragma once

// Strip-membership kernel: decides, for each start point, how long the orbit
// of z -> lambda e^z stays in the horizontal strip lo <= Im z <= hi.

#include <cstddef>
#include <cstdint>

#include "expdyn/kernels.hpp"
#include "expdyn/tower.hpp"

namespace expdyn::kernels {

struct StripParams {
  double lambda_re = 1.0;
  double lambda_im = 0.0;
  double abs_lambda = 1.0;
  double log_abs_lambda = 0.0;
  double arg_lambda = 0.0;
  bool lambda_real = true;
  double lo = 0.0;
  double hi = 0.0;
  int depth = 1;
};

StripParams make_strip_params(double lambda_re, double lambda_im, double lo, double hi, int depth);
// The deterministic sincos is only accurate for moderate arguments.
bool strip_kernel_supported(const StripParams& p);

enum class Outcome : std::uint8_t { kExit, kMember, kCaveat, kUndecided };

struct StripTrace {
  Outcome outcome = Outcome::kMember;
  int index = 0;           // exit / undecided / caveat index
  bool snapped = false;    // some iterate was snapped onto the real axis
  bool far = false;        // the deciding iterate was in log-polar form
  double re = 0.0;         // native deciding iterate
  double im = 0.0;
  TowerReal far_log_modulus;
  double far_argument = 0.0;
};

// Native-phase state of one start point.
struct LaneState {
  double x = 0.0;
  double y = 0.0;
  double err = 0.0;
  bool exact = false;
  int n = 0;
};

LaneState initial_state(const StripParams& p, double x0, double y0);

enum class NativeStop { kExit, kMember, kCaveat, kEscalate };
// Runs native iterations until a decision or until the next image leaves
// native range. Reference for the vector kernels.
NativeStop run_native(const StripParams& p, LaneState& s, bool* snapped);

StripTrace trace_strip_point(const StripParams& p, double x0, double y0);
// Continues a lane that stopped with kEscalate.
StripTrace continue_escalated(const StripParams& p, const LaneState& s);

std::int32_t conservative_code(const StripTrace& t, int depth);
std::int32_t optimistic_code(const StripTrace& t, int depth);

void strip_field_scalar(const StripParams& p, const double* re, const double* im,
                        std::size_t count, std::int32_t* conservative, std::int32_t* optimistic);
void strip_field_avx2(const StripParams& p, const double* re, const double* im,
                      std::size_t count, std::int32_t* conservative, std::int32_t* optimistic);
void strip_field(Backend b, const StripParams& p, const double* re, const double* im,
                 std::size_t count, std::int32_t* conservative, std::int32_t* optimistic);

// Packed (floor((x-x0)/eps), floor((y-y0)/eps)) box keys. Returns false when
// an index does not fit in 32 bits.
bool box_keys_scalar(const double* x, const double* y, std::size_t count, double x0, double y0,
                     double eps, std::int64_t* keys);
bool box_keys_avx2(const double* x, const double* y, std::size_t count, double x0, double y0,
                   double eps, std::int64_t* keys);
bool box_keys(Backend b, const double* x, const double* y, std::size_t count, double x0,
              double y0, double eps, std::int64_t* keys);

inline std::int64_t pack_box_key(std::int32_t ix, std::int32_t iy) {
  return static_cast<std::int64_t>((static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
                                   static_cast<std::uint32_t>(iy));
}

}  // namespace expdyn::kernels
