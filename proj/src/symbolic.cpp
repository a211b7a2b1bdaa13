#include "expdyn/symbolic.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "expdyn/errors.hpp"

namespace expdyn {

double strip_lower_edge(double arg_lambda, std::int64_t k) {
  return static_cast<double>(2 * k - 1) * kPi - arg_lambda;
}

double strip_upper_edge(double arg_lambda, std::int64_t k) {
  return static_cast<double>(2 * k + 1) * kPi - arg_lambda;
}

std::int64_t strip_index_of_imag(double arg_lambda, double im) {
  if (!std::isfinite(im)) throw RangeError("strip_index: non-finite imaginary part");
  const double guess = std::ceil((im + arg_lambda) / kTwoPi - 0.5);
  if (std::fabs(guess) > 1e15) throw RangeError("strip_index: imaginary part too large");
  auto k = static_cast<std::int64_t>(guess);
  while (im > strip_upper_edge(arg_lambda, k)) ++k;
  while (im <= strip_lower_edge(arg_lambda, k)) --k;
  return k;
}

std::int64_t strip_index(Complex lambda, Complex z) {
  return strip_index_of_imag(principal_arg(lambda), z.imag());
}

ExternalAddress::ExternalAddress(std::vector<std::int64_t> prefix, Generator g)
    : prefix_(std::move(prefix)), generator_(g) {
  if (g != Generator::kNone && prefix_.empty()) {
    throw ValidationError("infinite address needs a nonempty prefix");
  }
  for (auto v : prefix_) bound_ = std::max<std::int64_t>(bound_, std::llabs(v));
}

ExternalAddress ExternalAddress::finite(std::vector<std::int64_t> entries) {
  return ExternalAddress(std::move(entries), Generator::kNone);
}

ExternalAddress ExternalAddress::constant_tail(std::vector<std::int64_t> prefix) {
  return ExternalAddress(std::move(prefix), Generator::kConstant);
}

ExternalAddress ExternalAddress::periodic(std::vector<std::int64_t> period) {
  return ExternalAddress(std::move(period), Generator::kPeriodic);
}

ExternalAddress ExternalAddress::parse(const std::string& text) {
  std::string body = text;
  Generator g = Generator::kNone;
  const auto dots = body.find("...");
  if (dots != std::string::npos) {
    const std::string suffix = body.substr(dots + 3);
    body = body.substr(0, dots);
    if (suffix == "const") {
      g = Generator::kConstant;
    } else if (suffix == "period") {
      g = Generator::kPeriodic;
    } else {
      throw ValidationError("address: unknown suffix '..." + suffix + "'");
    }
  }
  std::vector<std::int64_t> entries;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw ValidationError("address: empty entry in '" + text + "'");
    char* end = nullptr;
    const long long v = std::strtoll(item.c_str(), &end, 10);
    if (*end != '\0') throw ValidationError("address: bad entry '" + item + "'");
    entries.push_back(v);
  }
  if (entries.empty()) throw ValidationError("address: no entries in '" + text + "'");
  return ExternalAddress(std::move(entries), g);
}

std::size_t ExternalAddress::length() const {
  return is_infinite() ? SIZE_MAX : prefix_.size();
}

std::int64_t ExternalAddress::entry(std::size_t n) const {
  if (n < prefix_.size()) return prefix_[n];
  switch (generator_) {
    case Generator::kConstant:
      return prefix_.back();
    case Generator::kPeriodic:
      return prefix_[n % prefix_.size()];
    case Generator::kNone:
      break;
  }
  throw ValidationError("address: entry " + std::to_string(n) + " beyond finite prefix");
}

std::vector<std::int64_t> ExternalAddress::take(std::size_t n) const {
  std::vector<std::int64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(entry(i));
  return out;
}

ExternalAddress ExternalAddress::shift() const {
  if (prefix_.empty()) throw ValidationError("shift of an empty address");
  switch (generator_) {
    case Generator::kPeriodic: {
      std::vector<std::int64_t> p(prefix_.begin() + 1, prefix_.end());
      p.push_back(prefix_.front());
      return periodic(std::move(p));
    }
    case Generator::kConstant:
      if (prefix_.size() == 1) return *this;
      return constant_tail(std::vector<std::int64_t>(prefix_.begin() + 1, prefix_.end()));
    case Generator::kNone:
      break;
  }
  return finite(std::vector<std::int64_t>(prefix_.begin() + 1, prefix_.end()));
}

std::string ExternalAddress::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(prefix_[i]);
  }
  if (generator_ == Generator::kConstant) s += "...const";
  if (generator_ == Generator::kPeriodic) s += "...period";
  return s;
}

namespace {

// Strip index of an orbit point when its imaginary part is resolved.
std::optional<std::int64_t> resolved_strip(const OrbitStepper& stepper, const OrbitPoint& p) {
  const double a = stepper.arg_lambda();
  if (p.exact_real) return strip_index_of_imag(a, 0.0);
  const std::optional<double> im = p.imag_part();
  if (!im || !std::isfinite(p.error)) return std::nullopt;
  // Beyond 2^53 the strip spacing is below the spacing of doubles.
  if (std::fabs(*im) > 1e15) return std::nullopt;
  const double err = p.native ? p.error : p.error * std::exp(p.polar.log_modulus.to_double());
  const std::int64_t k = strip_index_of_imag(a, *im);
  const double gap = std::min(*im - strip_lower_edge(a, k), strip_upper_edge(a, k) - *im);
  // The upper edge belongs to the strip, so gap == 0 there is fine when exact.
  if (err > 0.0 && !(gap > err)) return std::nullopt;
  return k;
}

}  // namespace

std::vector<std::int64_t> itinerary(Complex lambda, Complex z, int n) {
  if (n < 0) throw ValidationError("itinerary: negative length");
  const OrbitStepper stepper(lambda, false);
  std::vector<std::int64_t> out;
  OrbitPoint p = stepper.start(z);
  for (int i = 0; i < n; ++i) {
    if (i > 0) p = stepper.step(p);
    // The starting point is the datum itself; only later iterates carry error.
    const std::optional<std::int64_t> k =
        i == 0 ? std::optional<std::int64_t>(strip_index_of_imag(stepper.arg_lambda(), z.imag()))
               : resolved_strip(stepper, p);
    if (!k) {
      throw PrecisionError("itinerary: argument precision exhausted at iterate " +
                           std::to_string(i));
    }
    out.push_back(*k);
  }
  return out;
}

int resolved_itinerary_length(Complex lambda, Complex z, int n) {
  const OrbitStepper stepper(lambda, false);
  OrbitPoint p = stepper.start(z);
  for (int i = 0; i < n; ++i) {
    if (i > 0) p = stepper.step(p);
    if (i > 0 && !resolved_strip(stepper, p)) return i;
  }
  return n;
}

ExternalAddress rempe_address(const ExternalAddress& r, const std::vector<int>& blocks) {
  if (blocks.empty()) throw ValidationError("rempe_address: no blocks");
  std::vector<std::int64_t> out;
  std::int64_t seen_max = 0;
  bool seen_any = false;
  out.push_back(2 + r.bound());
  for (int nj : blocks) {
    if (nj < 1) throw ValidationError("rempe_address: block lengths must be >= 1");
    for (int i = 0; i < nj; ++i) {
      const std::int64_t v = r.entry(static_cast<std::size_t>(i));
      if (v < 0) throw ValidationError("rempe_address: r entries must be nonnegative");
      seen_max = seen_any ? std::max(seen_max, v) : v;
      seen_any = true;
      out.push_back(v);
    }
    out.push_back(2 + seen_max);
  }
  return ExternalAddress::finite(std::move(out));
}

}  // namespace expdyn
