#pragma once

// Deterministic exp/sincos shared (operation for operation) by the scalar
// kernels and their AVX2 counterparts, so both produce identical bits.

#include <cmath>
#include <cstdint>
#include <cstring>

namespace expdyn::kernels::detmath {

inline constexpr double kLog2e = 1.4426950408889634;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpFlush = -708.0;

// 1/k! for k = 0..13
inline constexpr double kExpCoeff[14] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;
inline constexpr double kPio2_1 = 1.57079632673412561417e+00;
inline constexpr double kPio2_2 = 6.07710050630396597660e-11;
inline constexpr double kPio2_3 = 2.02226624871116645580e-21;

// sin: r + r^3 * (s1 + r^2 s2 + ...), coefficients (-1)^k/(2k+1)!
inline constexpr double kSinCoeff[8] = {
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
};

// cos: 1 + r^2 * (c1 + r^2 c2 + ...), coefficients (-1)^k/(2k)!
inline constexpr double kCosCoeff[9] = {
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
    -1.0 / 6402373705728000.0,
};

// Valid for x < 709; returns 0 below kExpFlush.
inline double exp(double x) {
  if (x < kExpFlush) return 0.0;
  const double k = std::nearbyint(x * kLog2e);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  double p = kExpCoeff[13];
  for (int i = 12; i >= 0; --i) p = p * r + kExpCoeff[i];
  const std::int64_t bits = (static_cast<std::int64_t>(k) + 1023) << 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return p * scale;
}

// Accurate for |y| up to about 1e5.
inline void sincos(double y, double* s, double* c) {
  const double q = std::nearbyint(y * kTwoOverPi);
  const double r = ((y - q * kPio2_1) - q * kPio2_2) - q * kPio2_3;
  const double r2 = r * r;
  double ps = kSinCoeff[7];
  for (int i = 6; i >= 0; --i) ps = ps * r2 + kSinCoeff[i];
  double pc = kCosCoeff[8];
  for (int i = 7; i >= 0; --i) pc = pc * r2 + kCosCoeff[i];
  const double sv = r + (r * r2) * ps;
  const double cv = 1.0 + r2 * pc;
  const auto n = static_cast<std::int32_t>(q);
  double so = (n & 1) ? cv : sv;
  double co = (n & 1) ? sv : cv;
  if (n & 2) so = -so;
  if ((n + 1) & 2) co = -co;
  *s = so;
  *c = co;
}

}  // namespace expdyn::kernels::detmath
