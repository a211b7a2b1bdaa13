// AVX2 strip-membership and box-key kernels. Every arithmetic step mirrors
// field_scalar.cpp / detmath.hpp in the same order so results match bit for bit.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "expdyn/core_dynamics.hpp"
#include "kernels/detmath.hpp"
#include "kernels/field_kernel.hpp"

namespace expdyn::kernels {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }
inline __m256d vneg(__m256d v) { return _mm256_xor_pd(_mm256_set1_pd(-0.0), v); }

__m256d vexp(__m256d x) {
  using namespace detmath;
  const __m256d flush = _mm256_cmp_pd(x, _mm256_set1_pd(kExpFlush), _CMP_LT_OQ);
  const __m256d xs = _mm256_max_pd(x, _mm256_set1_pd(kExpFlush));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(xs, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(_mm256_sub_pd(xs, _mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi))),
                                  _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));
  __m256d p = _mm256_set1_pd(kExpCoeff[13]);
  for (int i = 12; i >= 0; --i) {
    p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kExpCoeff[i]));
  }
  const __m256i ki = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(k));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  const __m256d v = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_blendv_pd(v, _mm256_setzero_pd(), flush);
}

void vsincos(__m256d y, __m256d* s, __m256d* c) {
  using namespace detmath;
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(
      _mm256_sub_pd(_mm256_sub_pd(y, _mm256_mul_pd(q, _mm256_set1_pd(kPio2_1))),
                    _mm256_mul_pd(q, _mm256_set1_pd(kPio2_2))),
      _mm256_mul_pd(q, _mm256_set1_pd(kPio2_3)));
  const __m256d r2 = _mm256_mul_pd(r, r);
  __m256d ps = _mm256_set1_pd(kSinCoeff[7]);
  for (int i = 6; i >= 0; --i) ps = _mm256_add_pd(_mm256_mul_pd(ps, r2), _mm256_set1_pd(kSinCoeff[i]));
  __m256d pc = _mm256_set1_pd(kCosCoeff[8]);
  for (int i = 7; i >= 0; --i) pc = _mm256_add_pd(_mm256_mul_pd(pc, r2), _mm256_set1_pd(kCosCoeff[i]));
  const __m256d sv = _mm256_add_pd(r, _mm256_mul_pd(_mm256_mul_pd(r, r2), ps));
  const __m256d cv = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(r2, pc));

  const __m128i n = _mm256_cvtpd_epi32(q);
  const __m128i zero = _mm_setzero_si128();
  const __m256d swap = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(
      _mm_xor_si128(_mm_cmpeq_epi32(_mm_and_si128(n, _mm_set1_epi32(1)), zero), _mm_set1_epi32(-1))));
  const __m256d sflip = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(
      _mm_xor_si128(_mm_cmpeq_epi32(_mm_and_si128(n, _mm_set1_epi32(2)), zero), _mm_set1_epi32(-1))));
  const __m256d cflip = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(_mm_xor_si128(
      _mm_cmpeq_epi32(_mm_and_si128(_mm_add_epi32(n, _mm_set1_epi32(1)), _mm_set1_epi32(2)), zero),
      _mm_set1_epi32(-1))));
  __m256d so = _mm256_blendv_pd(sv, cv, swap);
  __m256d co = _mm256_blendv_pd(cv, sv, swap);
  so = _mm256_blendv_pd(so, vneg(so), sflip);
  co = _mm256_blendv_pd(co, vneg(co), cflip);
  *s = so;
  *c = co;
}

void finish_lane(const StripTrace& t, int depth, std::int32_t* cons, std::int32_t* opt) {
  *cons = conservative_code(t, depth);
  *opt = optimistic_code(t, depth);
}

}  // namespace

void strip_field_avx2(const StripParams& p, const double* re, const double* im,
                      std::size_t count, std::int32_t* conservative, std::int32_t* optimistic) {
  const __m256d lo = _mm256_set1_pd(p.lo);
  const __m256d hi = _mm256_set1_pd(p.hi);
  const __m256d lr = _mm256_set1_pd(p.lambda_re);
  const __m256d li = _mm256_set1_pd(p.lambda_im);
  const __m256d abs_l = _mm256_set1_pd(p.abs_lambda);
  const __m256d log_abs_l = _mm256_set1_pd(p.log_abs_lambda);
  const __m256d abs_arg = _mm256_set1_pd(std::fabs(p.arg_lambda));
  const __m256d limit = _mm256_set1_pd(kNativeExpLimit);
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d four_eps = _mm256_set1_pd(4.0 * kEps);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d last = _mm256_set1_pd(static_cast<double>(p.depth - 1));
  const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  const __m256d real_lambda = p.lambda_real ? all : _mm256_setzero_pd();

  for (std::size_t base = 0; base < count; base += 4) {
    const std::size_t lanes = std::min<std::size_t>(4, count - base);
    alignas(32) double xin[4] = {0, 0, 0, 0};
    alignas(32) double yin[4] = {0, 0, 0, 0};
    for (std::size_t l = 0; l < lanes; ++l) {
      xin[l] = re[base + l];
      yin[l] = im[base + l];
    }
    __m256d x = _mm256_load_pd(xin);
    __m256d y = _mm256_load_pd(yin);
    __m256d exact = _mm256_and_pd(real_lambda, _mm256_cmp_pd(y, _mm256_setzero_pd(), _CMP_EQ_OQ));
    __m256d err = _mm256_mul_pd(_mm256_set1_pd(kEps),
                                _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y))));
    err = _mm256_andnot_pd(exact, err);
    __m256d n = _mm256_setzero_pd();
    int active = (1 << lanes) - 1;

    for (;;) {
      const __m256d act = _mm256_castsi256_pd(_mm256_set_epi64x(
          (active & 8) ? -1 : 0, (active & 4) ? -1 : 0, (active & 2) ? -1 : 0, (active & 1) ? -1 : 0));
      // snap onto the real axis
      const __m256d snap = _mm256_and_pd(
          _mm256_and_pd(real_lambda, _mm256_andnot_pd(exact, act)),
          _mm256_cmp_pd(vabs(y), err, _CMP_LE_OQ));
      y = _mm256_blendv_pd(y, _mm256_setzero_pd(), snap);
      err = _mm256_blendv_pd(err, _mm256_setzero_pd(), snap);
      exact = _mm256_or_pd(exact, snap);

      const __m256d member = _mm256_and_pd(_mm256_cmp_pd(lo, y, _CMP_LE_OQ),
                                           _mm256_cmp_pd(y, hi, _CMP_LE_OQ));
      const int exit_mask = active & ~_mm256_movemask_pd(member);
      const int done_mask = (active & ~exit_mask) & _mm256_movemask_pd(_mm256_cmp_pd(n, last, _CMP_EQ_OQ));
      const int cav_mask = (active & ~exit_mask & ~done_mask) &
                           _mm256_movemask_pd(_mm256_andnot_pd(exact, _mm256_cmp_pd(err, two_pi, _CMP_GT_OQ)));
      const __m256d t = _mm256_add_pd(x, log_abs_l);
      const __m256d native_ok = _mm256_and_pd(_mm256_cmp_pd(t, limit, _CMP_LT_OQ),
                                              _mm256_cmp_pd(x, limit, _CMP_LT_OQ));
      const int esc_mask = (active & ~exit_mask & ~done_mask & ~cav_mask) &
                           ~_mm256_movemask_pd(native_ok);
      const int stop_mask = exit_mask | done_mask | cav_mask | esc_mask;
      if (stop_mask) {
        alignas(32) double xs[4], ys[4], es[4], ns[4], ex[4];
        _mm256_store_pd(xs, x);
        _mm256_store_pd(ys, y);
        _mm256_store_pd(es, err);
        _mm256_store_pd(ns, n);
        _mm256_store_pd(ex, exact);
        for (int l = 0; l < 4; ++l) {
          if (!(stop_mask & (1 << l))) continue;
          std::int32_t* cons = conservative + base + l;
          std::int32_t* opt = optimistic + base + l;
          const int nl = static_cast<int>(ns[l]);
          if (exit_mask & (1 << l)) {
            *cons = *opt = nl + 1;
          } else if ((done_mask | cav_mask) & (1 << l)) {
            *cons = *opt = p.depth + 1;
          } else {
            LaneState s;
            s.x = xs[l];
            s.y = ys[l];
            s.err = es[l];
            s.exact = std::isnan(ex[l]);  // all-ones bit pattern
            s.n = nl;
            finish_lane(continue_escalated(p, s), p.depth, cons, opt);
          }
        }
        active &= ~stop_mask;
      }
      if (!active) break;

      const __m256d live = _mm256_castsi256_pd(_mm256_set_epi64x(
          (active & 8) ? -1 : 0, (active & 4) ? -1 : 0, (active & 2) ? -1 : 0, (active & 1) ? -1 : 0));
      const __m256d xs = _mm256_and_pd(live, x);
      const __m256d ys = _mm256_and_pd(live, y);
      const __m256d m = vexp(xs);
      __m256d sn, cs;
      vsincos(ys, &sn, &cs);
      const __m256d wr = _mm256_mul_pd(m, cs);
      const __m256d wi = _mm256_mul_pd(m, sn);
      const __m256d nx = _mm256_sub_pd(_mm256_mul_pd(lr, wr), _mm256_mul_pd(li, wi));
      const __m256d ny = _mm256_add_pd(_mm256_mul_pd(lr, wi), _mm256_mul_pd(li, wr));
      const __m256d absw = _mm256_mul_pd(m, abs_l);
      const __m256d ne = _mm256_mul_pd(
          absw, _mm256_add_pd(err, _mm256_mul_pd(four_eps, _mm256_add_pd(_mm256_add_pd(one, vabs(ys)), abs_arg))));
      err = _mm256_blendv_pd(err, _mm256_andnot_pd(exact, ne), live);
      x = _mm256_blendv_pd(x, nx, live);
      y = _mm256_blendv_pd(y, ny, live);
      n = _mm256_blendv_pd(n, _mm256_add_pd(n, one), live);
    }
  }
}

bool box_keys_avx2(const double* x, const double* y, std::size_t count, double x0, double y0,
                   double eps, std::int64_t* keys) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  const __m256d ve = _mm256_set1_pd(eps);
  const __m256d lim_hi = _mm256_set1_pd(2147483647.0);
  const __m256d lim_lo = _mm256_set1_pd(-2147483648.0);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d fx = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vx0), ve));
    const __m256d fy = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(y + i), vy0), ve));
    const __m256d ok = _mm256_and_pd(
        _mm256_and_pd(_mm256_cmp_pd(fx, lim_lo, _CMP_GE_OQ), _mm256_cmp_pd(fx, lim_hi, _CMP_LE_OQ)),
        _mm256_and_pd(_mm256_cmp_pd(fy, lim_lo, _CMP_GE_OQ), _mm256_cmp_pd(fy, lim_hi, _CMP_LE_OQ)));
    if (_mm256_movemask_pd(ok) != 0xF) return false;
    alignas(16) std::int32_t ix[4], iy[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(ix), _mm256_cvttpd_epi32(fx));
    _mm_store_si128(reinterpret_cast<__m128i*>(iy), _mm256_cvttpd_epi32(fy));
    for (int l = 0; l < 4; ++l) keys[i + l] = pack_box_key(ix[l], iy[l]);
  }
  return box_keys_scalar(x + i, y + i, count - i, x0, y0, eps, keys + i);
}

}  // namespace expdyn::kernels
