#include <cmath>

#include "kernels/field_kernel.hpp"

namespace expdyn::kernels {

bool box_keys_scalar(const double* x, const double* y, std::size_t count, double x0, double y0,
                     double eps, std::int64_t* keys) {
  for (std::size_t i = 0; i < count; ++i) {
    const double fx = std::floor((x[i] - x0) / eps);
    const double fy = std::floor((y[i] - y0) / eps);
    if (!(fx >= -2147483648.0 && fx <= 2147483647.0 && fy >= -2147483648.0 && fy <= 2147483647.0)) {
      return false;
    }
    keys[i] = pack_box_key(static_cast<std::int32_t>(fx), static_cast<std::int32_t>(fy));
  }
  return true;
}

}  // namespace expdyn::kernels
