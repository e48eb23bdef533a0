// AVX2+FMA variant of the decay kernels. The whole weight
// w = exp(-alpha * t^beta) is computed in vector registers:
//   t^beta   = 2^(beta * log2(t)),  log2(t) kept as a hi/lo pair so the
//              integer exponent never swamps the mantissa bits,
//   exp(u)   = 2^(u * log2(e)),     u * log2(e) again split with FMA.
// Worst-case relative error against an exact evaluation is ~1e-14 for
// weights down to 1e-30 (the exponent magnitude amplifies the t^beta
// rounding, so error grows as the weight underflows; such terms are
// negligible in every sum this kernel feeds).

#include "gravcat/kernels.hpp"

#if GRAVCAT_BUILD_AVX2

#include <immintrin.h>

#include <cmath>

namespace gravcat {
namespace {

// ---- constants ------------------------------------------------------------

// 2/ln(2) as a double-double pair.
const __m256d kTwoOverLn2Hi = _mm256_set1_pd(2.8853900817779268);
const __m256d kTwoOverLn2Lo = _mm256_set1_pd(1.4719849362003783e-17);
// log2(e) as a double-double pair.
const __m256d kLog2eHi = _mm256_set1_pd(1.4426950408889634);
const __m256d kLog2eLo = _mm256_set1_pd(7.359924681001891e-18);

const __m256d kOne = _mm256_set1_pd(1.0);
const __m256d kHalf = _mm256_set1_pd(0.5);
const __m256d kSqrt2 = _mm256_set1_pd(1.4142135623730951);

// 2^r on [-0.5, 0.5]: Taylor coefficients ln(2)^i / i!. The degree-13 tail
// is ~4e-18, below the 2^-53 noise floor.
const __m256d kExpC1 = _mm256_set1_pd(0.6931471805599453);
const __m256d kExpC2 = _mm256_set1_pd(0.24022650695910072);
const __m256d kExpC3 = _mm256_set1_pd(0.05550410866482158);
const __m256d kExpC4 = _mm256_set1_pd(0.009618129107628477);
const __m256d kExpC5 = _mm256_set1_pd(0.0013333558146428443);
const __m256d kExpC6 = _mm256_set1_pd(0.0001540353039338161);
const __m256d kExpC7 = _mm256_set1_pd(1.5252733804059841e-05);
const __m256d kExpC8 = _mm256_set1_pd(1.321548679014431e-06);
const __m256d kExpC9 = _mm256_set1_pd(1.01780860092397e-07);
const __m256d kExpC10 = _mm256_set1_pd(7.054911620801123e-09);
const __m256d kExpC11 = _mm256_set1_pd(4.4455382718708116e-10);
const __m256d kExpC12 = _mm256_set1_pd(2.5678435993488206e-11);
const __m256d kExpC13 = _mm256_set1_pd(1.3691488853904128e-12);

// atanh(s)/s - 1 = q/3 + q^2/5 + ... with q = s^2 <= 0.0295; truncation at
// q^12 is ~6e-21 relative.
const __m256d kAtC0 = _mm256_set1_pd(0.3333333333333333);
const __m256d kAtC1 = _mm256_set1_pd(0.2);
const __m256d kAtC2 = _mm256_set1_pd(0.14285714285714285);
const __m256d kAtC3 = _mm256_set1_pd(0.1111111111111111);
const __m256d kAtC4 = _mm256_set1_pd(0.09090909090909091);
const __m256d kAtC5 = _mm256_set1_pd(0.07692307692307693);
const __m256d kAtC6 = _mm256_set1_pd(0.06666666666666667);
const __m256d kAtC7 = _mm256_set1_pd(0.058823529411764705);
const __m256d kAtC8 = _mm256_set1_pd(0.05263157894736842);
const __m256d kAtC9 = _mm256_set1_pd(0.047619047619047616);
const __m256d kAtC10 = _mm256_set1_pd(0.043478260869565216);
const __m256d kAtC11 = _mm256_set1_pd(0.04);

// ---- building blocks -------------------------------------------------------

// 2^k for integer-valued k in [-1022, 1023], built in the exponent field.
inline __m256d pow2i(__m256d k) {
  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m256i ki64 = _mm256_cvtepi32_epi64(ki);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(ki64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

// log2(t) as hi + lo for t in (0, inf). Subnormal inputs are pre-scaled by
// 2^54; the hi/lo split keeps the large integer exponent from rounding away
// the mantissa contribution.
inline void log2_dd(__m256d t, __m256d& hi, __m256d& lo) {
  const __m256d is_tiny = _mm256_cmp_pd(t, _mm256_set1_pd(0x1p-1022), _CMP_LT_OQ);
  t = _mm256_blendv_pd(t, _mm256_mul_pd(t, _mm256_set1_pd(0x1p54)), is_tiny);

  const __m256i bits = _mm256_castpd_si256(t);
  // exponent field -> double via the 2^52 bit trick
  const __m256i expfield = _mm256_srli_epi64(bits, 52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(
          _mm256_or_si256(expfield, _mm256_set1_epi64x(0x4330000000000000LL))),
      _mm256_set1_pd(0x1p52));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  e = _mm256_blendv_pd(e, _mm256_sub_pd(e, _mm256_set1_pd(54.0)), is_tiny);

  // mantissa in [1, 2), then shifted into (sqrt2/2, sqrt2]
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL)));
  const __m256d shift = _mm256_cmp_pd(m, kSqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, kHalf), shift);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, kOne), shift);

  // log2(m) = (2/ln2) * atanh(s), s = (m-1)/(m+1); m-1 is exact (Sterbenz)
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, kOne), _mm256_add_pd(m, kOne));
  const __m256d q = _mm256_mul_pd(s, s);
  __m256d p = kAtC11;
  p = _mm256_fmadd_pd(p, q, kAtC10);
  p = _mm256_fmadd_pd(p, q, kAtC9);
  p = _mm256_fmadd_pd(p, q, kAtC8);
  p = _mm256_fmadd_pd(p, q, kAtC7);
  p = _mm256_fmadd_pd(p, q, kAtC6);
  p = _mm256_fmadd_pd(p, q, kAtC5);
  p = _mm256_fmadd_pd(p, q, kAtC4);
  p = _mm256_fmadd_pd(p, q, kAtC3);
  p = _mm256_fmadd_pd(p, q, kAtC2);
  p = _mm256_fmadd_pd(p, q, kAtC1);
  p = _mm256_fmadd_pd(p, q, kAtC0);
  const __m256d a_lo = _mm256_mul_pd(_mm256_mul_pd(s, q), p);  // atanh(s) - s

  // (c_hi + c_lo) * (s + a_lo) with the product error recovered by FMA
  const __m256d p_hi = _mm256_mul_pd(kTwoOverLn2Hi, s);
  const __m256d p_err = _mm256_fmsub_pd(kTwoOverLn2Hi, s, p_hi);
  const __m256d p_lo = _mm256_add_pd(
      p_err, _mm256_fmadd_pd(kTwoOverLn2Hi, a_lo, _mm256_mul_pd(kTwoOverLn2Lo, s)));

  // branch-free 2Sum(e, p_hi)
  const __m256d h = _mm256_add_pd(e, p_hi);
  const __m256d a1 = _mm256_sub_pd(h, p_hi);
  const __m256d b1 = _mm256_sub_pd(h, a1);
  const __m256d err =
      _mm256_add_pd(_mm256_sub_pd(e, a1), _mm256_sub_pd(p_hi, b1));
  hi = h;
  lo = _mm256_add_pd(err, p_lo);
}

// 2^(z_hi + z_lo) with z_hi clamped to [-1080, 1030]: beyond those bounds the
// true value underflows to 0 / overflows to inf anyway, and the clamp keeps
// the two-step exponent scaling in range.
inline __m256d exp2_dd(__m256d z_hi, __m256d z_lo) {
  z_hi = _mm256_max_pd(_mm256_set1_pd(-1080.0),
                       _mm256_min_pd(z_hi, _mm256_set1_pd(1030.0)));
  const __m256d k =
      _mm256_round_pd(z_hi, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_add_pd(_mm256_sub_pd(z_hi, k), z_lo);

  __m256d p = kExpC13;
  p = _mm256_fmadd_pd(p, r, kExpC12);
  p = _mm256_fmadd_pd(p, r, kExpC11);
  p = _mm256_fmadd_pd(p, r, kExpC10);
  p = _mm256_fmadd_pd(p, r, kExpC9);
  p = _mm256_fmadd_pd(p, r, kExpC8);
  p = _mm256_fmadd_pd(p, r, kExpC7);
  p = _mm256_fmadd_pd(p, r, kExpC6);
  p = _mm256_fmadd_pd(p, r, kExpC5);
  p = _mm256_fmadd_pd(p, r, kExpC4);
  p = _mm256_fmadd_pd(p, r, kExpC3);
  p = _mm256_fmadd_pd(p, r, kExpC2);
  p = _mm256_fmadd_pd(p, r, kExpC1);
  p = _mm256_fmadd_pd(p, r, kOne);

  // scale by 2^k in two halves so |k| up to 1080 stays in the normal range
  const __m256d k1 = _mm256_round_pd(_mm256_mul_pd(k, kHalf),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d k2 = _mm256_sub_pd(k, k1);
  return _mm256_mul_pd(_mm256_mul_pd(p, pow2i(k1)), pow2i(k2));
}

// exp(-alpha * t^beta) for t > 0; t == 0 lanes are blended by the callers.
inline __m256d decay_core(__m256d t, __m256d valpha, __m256d vbeta) {
  __m256d lh, ll;
  log2_dd(t, lh, ll);
  const __m256d zh = _mm256_mul_pd(vbeta, lh);
  const __m256d zerr = _mm256_fmsub_pd(vbeta, lh, zh);
  const __m256d zl = _mm256_fmadd_pd(vbeta, ll, zerr);
  const __m256d powed = exp2_dd(zh, zl);  // t^beta

  const __m256d u = _mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), valpha), powed);
  const __m256d yh = _mm256_mul_pd(u, kLog2eHi);
  const __m256d yerr = _mm256_fmsub_pd(u, kLog2eHi, yh);
  const __m256d yl = _mm256_fmadd_pd(u, kLog2eLo, yerr);
  return exp2_dd(yh, yl);
}

inline double decay_scalar_tail(double t, double alpha, double beta) {
  if (t == 0.0) return 1.0;
  return std::exp(-alpha * std::pow(t, beta));
}

// ---- kernel entry points ----------------------------------------------------

void decay_weights_avx2(const double* t, std::size_t n, double alpha,
                        double beta, double tau, double* w_out) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vtau = _mm256_set1_pd(tau);
  const std::size_t nv = n & ~std::size_t(3);
  for (std::size_t k = 0; k < nv; k += 4) {
    const __m256d vt = _mm256_loadu_pd(t + k);
    const __m256d keep = _mm256_cmp_pd(vt, vtau, _CMP_LE_OQ);
    __m256d w = decay_core(vt, va, vb);
    w = _mm256_blendv_pd(w, kOne,
                         _mm256_cmp_pd(vt, _mm256_setzero_pd(), _CMP_EQ_OQ));
    w = _mm256_and_pd(w, keep);
    _mm256_storeu_pd(w_out + k, w);
  }
  for (std::size_t k = nv; k < n; ++k) {
    w_out[k] = (t[k] <= tau) ? decay_scalar_tail(t[k], alpha, beta) : 0.0;
  }
}

double decay_dot_avx2(const double* t, const std::uint32_t* idx,
                      const double* values, std::size_t n, double alpha,
                      double beta, double tau) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vtau = _mm256_set1_pd(tau);
  const std::size_t nv = n & ~std::size_t(3);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < nv; k += 4) {
    const __m256d vt = _mm256_loadu_pd(t + k);
    const __m256d keep = _mm256_cmp_pd(vt, vtau, _CMP_LE_OQ);
    // fully pruned blocks contribute exactly 0; skipping them is identical
    if (_mm256_movemask_pd(keep) == 0) continue;
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m256d vv = _mm256_i32gather_pd(values, vi, 8);
    __m256d w = decay_core(vt, va, vb);
    w = _mm256_blendv_pd(w, kOne,
                         _mm256_cmp_pd(vt, _mm256_setzero_pd(), _CMP_EQ_OQ));
    w = _mm256_and_pd(w, keep);
    acc = _mm256_fmadd_pd(vv, w, acc);
  }
  // fixed reduction order: (l0 + l1) + (l2 + l3), then the scalar tail
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t k = nv; k < n; ++k) {
    if (t[k] <= tau) sum += values[idx[k]] * decay_scalar_tail(t[k], alpha, beta);
  }
  return sum;
}

double contour_dot_avx2(const double* t, const std::uint32_t* idx,
                        const double* values, std::size_t n, double tau) {
  const __m256d vtau = _mm256_set1_pd(tau);
  const std::size_t nv = n & ~std::size_t(3);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < nv; k += 4) {
    const __m256d vt = _mm256_loadu_pd(t + k);
    const __m256d keep = _mm256_cmp_pd(vt, vtau, _CMP_LE_OQ);
    if (_mm256_movemask_pd(keep) == 0) continue;
    const __m128i vi =
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m256d vv = _mm256_i32gather_pd(values, vi, 8);
    acc = _mm256_add_pd(acc, _mm256_and_pd(vv, keep));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t k = nv; k < n; ++k) {
    if (t[k] <= tau) sum += values[idx[k]];
  }
  return sum;
}

}  // namespace

const KernelTable* avx2_kernels() {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
    return nullptr;
  }
  static const KernelTable table = {"avx2", decay_weights_avx2, decay_dot_avx2,
                                    contour_dot_avx2};
  return &table;
}

}  // namespace gravcat

#endif  // GRAVCAT_BUILD_AVX2
