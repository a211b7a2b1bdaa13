#include <cstdlib>
#include <cstring>

#include "kernels/field_kernel.hpp"

namespace expdyn::kernels {

bool backend_available(Backend b) {
  if (b == Backend::kScalar) return true;
#if defined(EXPDYN_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend default_backend() {
  const char* forced = std::getenv("EXPDYN_KERNEL");
  if (forced && std::strcmp(forced, "scalar") == 0) return Backend::kScalar;
  return backend_available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

const char* backend_name(Backend b) { return b == Backend::kAvx2 ? "avx2" : "scalar"; }

#if !defined(EXPDYN_HAVE_AVX2)
void strip_field_avx2(const StripParams& p, const double* re, const double* im,
                      std::size_t count, std::int32_t* conservative, std::int32_t* optimistic) {
  strip_field_scalar(p, re, im, count, conservative, optimistic);
}

bool box_keys_avx2(const double* x, const double* y, std::size_t count, double x0, double y0,
                   double eps, std::int64_t* keys) {
  return box_keys_scalar(x, y, count, x0, y0, eps, keys);
}
#endif

void strip_field(Backend b, const StripParams& p, const double* re, const double* im,
                 std::size_t count, std::int32_t* conservative, std::int32_t* optimistic) {
  if (b == Backend::kAvx2 && backend_available(Backend::kAvx2)) {
    strip_field_avx2(p, re, im, count, conservative, optimistic);
  } else {
    strip_field_scalar(p, re, im, count, conservative, optimistic);
  }
}

bool box_keys(Backend b, const double* x, const double* y, std::size_t count, double x0,
              double y0, double eps, std::int64_t* keys) {
  if (b == Backend::kAvx2 && backend_available(Backend::kAvx2)) {
    return box_keys_avx2(x, y, count, x0, y0, eps, keys);
  }
  return box_keys_scalar(x, y, count, x0, y0, eps, keys);
}

}  // namespace expdyn::kernels
