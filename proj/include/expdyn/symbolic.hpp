#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "expdyn/core_dynamics.hpp"

namespace expdyn {

// Strip P_k = {(2k-1)pi - Arg lambda < Im z <= (2k+1)pi - Arg lambda}.
std::int64_t strip_index(Complex lambda, Complex z);
std::int64_t strip_index_of_imag(double arg_lambda, double im);
double strip_lower_edge(double arg_lambda, std::int64_t k);  // exclusive
double strip_upper_edge(double arg_lambda, std::int64_t k);  // inclusive

class ExternalAddress {
 public:
  enum class Generator { kNone, kConstant, kPeriodic };

  ExternalAddress() = default;
  static ExternalAddress finite(std::vector<std::int64_t> entries);
  // Repeats the last prefix entry forever.
  static ExternalAddress constant_tail(std::vector<std::int64_t> prefix);
  // Repeats the whole period forever.
  static ExternalAddress periodic(std::vector<std::int64_t> period);
  // "1,2,3", "0...const", "2,0,0,0...period"
  static ExternalAddress parse(const std::string& text);

  bool is_infinite() const { return generator_ != Generator::kNone; }
  bool empty() const { return prefix_.empty(); }
  // Number of defined entries; SIZE_MAX for infinite addresses.
  std::size_t length() const;
  std::int64_t entry(std::size_t n) const;
  std::vector<std::int64_t> take(std::size_t n) const;
  std::int64_t bound() const { return bound_; }
  Generator generator() const { return generator_; }
  const std::vector<std::int64_t>& prefix() const { return prefix_; }

  ExternalAddress shift() const;
  std::string to_string() const;

  friend bool operator==(const ExternalAddress& a, const ExternalAddress& b) {
    return a.generator_ == b.generator_ && a.prefix_ == b.prefix_;
  }

 private:
  ExternalAddress(std::vector<std::int64_t> prefix, Generator g);

  std::vector<std::int64_t> prefix_;
  Generator generator_ = Generator::kNone;
  std::int64_t bound_ = 0;
};

// Strip indices of z, f(z), ..., f^{n-1}(z). PrecisionError when an iterate's
// imaginary part is not resolved well enough to pick its strip.
std::vector<std::int64_t> itinerary(Complex lambda, Complex z, int n);
// Number of leading iterates whose strip index is resolved (at most n).
int resolved_itinerary_length(Complex lambda, Complex z, int n);

// T_1 r_0..r_{n_1-1} T r_0..r_{n_2-1} T ...; every T is 2 + max of the r
// entries consumed so far, and the first is 2 + bound(r).
ExternalAddress rempe_address(const ExternalAddress& r, const std::vector<int>& blocks);

}  // namespace expdyn
