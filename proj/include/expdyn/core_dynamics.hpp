#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "expdyn/tower.hpp"

namespace expdyn {

using Complex = std::complex<double>;

// Largest log-modulus kept in native complex form; beyond it orbits switch to
// log-polar form.
inline constexpr double kNativeExpLimit = 709.0;
// Argument error (radians) beyond which the argument carries no information.
inline constexpr double kArgumentTrustLimit = 6.283185307179586;
inline constexpr double kPi = 3.141592653589793;
inline constexpr double kTwoPi = 6.283185307179586;

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);
// std::arg with the -0 imaginary part mapped onto the upper edge.
double principal_arg(Complex z);

struct LogPolarComplex {
  TowerReal log_modulus{-std::numeric_limits<double>::infinity()};
  double argument = 0.0;

  static LogPolarComplex from_native(Complex z);
  bool is_zero() const;
  // Native value when the modulus fits a double.
  std::optional<Complex> to_native() const;
};

// Sign and magnitude of a real quantity that may exceed double range.
struct SignedTower {
  int sign = 0;
  TowerReal magnitude;
  std::optional<double> to_native() const;
};

// One orbit point plus its precision bookkeeping.
struct OrbitPoint {
  bool native = true;
  Complex z;                 // valid when native
  LogPolarComplex polar;     // always valid
  bool exact_real = false;   // exactly on the real axis (real lambda only)
  // Absolute error bound on Im z for native points, on the argument for far ones.
  double error = 0.0;

  bool argument_trusted() const { return exact_real || error < kArgumentTrustLimit; }
  SignedTower real_part() const;
  // Native imaginary part, if representable.
  std::optional<double> imag_part() const;
};

// Overflow-safe one-step map used by every orbit consumer.
class OrbitStepper {
 public:
  // snap_to_real: for real lambda, points within their error bound of the real
  // axis continue as exact real points (a shadow orbit). Itineraries turn this
  // off so that strip indices are only reported for the actual orbit.
  explicit OrbitStepper(Complex lambda, bool snap_to_real = true);

  // Starting point; the input is treated as a rounded real-number datum
  // (error eps|z0|), and snapped to the real axis when lambda is real.
  OrbitPoint start(Complex z0) const;
  OrbitPoint step(const OrbitPoint& p) const;

  Complex lambda() const { return lambda_; }
  double log_abs_lambda() const { return log_abs_; }
  double arg_lambda() const { return arg_; }
  bool lambda_real() const { return real_; }

 private:
  OrbitPoint make_native(Complex w, double error, bool exact) const;

  Complex lambda_;
  double log_abs_;
  double arg_;
  bool real_;
  bool snap_;
};

// lambda * e^z. Throws RangeError if the modulus would overflow.
Complex eval_map(Complex lambda, Complex z);

struct Orbit {
  std::vector<OrbitPoint> points;            // z_0 .. z_N
  std::optional<int> escape_index;           // first n with log|z_n| > threshold
  std::optional<int> untrusted_from;         // first n whose argument is untrusted
  bool precision_lost = false;               // derivative product exceeded 1e15
};

Orbit iterate_orbit(Complex lambda, Complex z0, int steps, double escape_log_modulus = 1e8);

// log|(f^n)'(z0)| = sum_{i=1..n} log|f^i(z0)|; RangeError outside native range.
double orbit_derivative_log(Complex lambda, Complex z0, int n);

// The preimage of w in strip P_k. DomainError for w = 0.
Complex inverse_branch(Complex lambda, Complex w, std::int64_t k);

// beta_1 .. beta_N of the orbit of the singular value 0.
std::vector<OrbitPoint> singular_orbit(Complex lambda, int n);

struct SupergrowthEntry {
  int n = 0;
  bool holds = false;
  std::optional<double> ratio;       // alpha_{n+1} / (c e^{alpha_n}) when representable
  std::optional<double> superreal;   // alpha_n / (c |beta_n| / |lambda|)
};

struct SupergrowthReport {
  bool holds = false;
  std::optional<int> first_failure_index;
  std::string failure_reason;
  std::vector<SupergrowthEntry> entries;  // n = n_min .. N-1
  std::vector<double> ratios;             // representable ratios, in n order
  std::optional<double> tail_ratio;       // (alpha_1+..+alpha_n)/alpha_{n+1}, last native n
  std::optional<double> max_passing_c;    // over representable entries
};

struct SupergrowthOptions {
  int n_min = 1;
  // Finite stand-in for alpha_n -> infinity: alpha_N must reach this value.
  double escape_alpha = 50.0;
};

SupergrowthReport check_supergrowth(Complex lambda, double c, int steps = 30,
                                    const SupergrowthOptions& options = {});

}  // namespace expdyn
