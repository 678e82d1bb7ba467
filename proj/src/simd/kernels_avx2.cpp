// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here runs unless the dispatcher saw both CPU features.

#include <immintrin.h>

#include "bicwire/simd/kernels.hpp"

namespace bicwire::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Cephes sin/cos: reduce by multiples of pi/4 (three-part constant), then
// degree-13/14 minimax polynomials on [-pi/4, pi/4].
constexpr double kFourOverPi = 1.27323954473516268615;
constexpr double kDP1 = 7.85398125648498535156e-1;
constexpr double kDP2 = 3.77489470793079817668e-8;
constexpr double kDP3 = 2.69515142907905952645e-15;
constexpr double kSinCof[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                               2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                               8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCosCof[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                               -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                               -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline __m256d polevl(__m256d x, const double (&c)[6]) {
  __m256d r = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(c[i]));
  return r;
}

inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);
  const __m256d x_sign = _mm256_and_pd(sign_bit, x);

  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(kFourOverPi)));
  const __m256d odd =
      _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.5)))));
  y = _mm256_add_pd(y, odd);
  __m256d octant =
      _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(8.0), _mm256_floor_pd(_mm256_mul_pd(y, _mm256_set1_pd(0.125)))));
  const __m256d upper_half = _mm256_cmp_pd(octant, _mm256_set1_pd(4.0), _CMP_GE_OQ);
  octant = _mm256_sub_pd(octant, _mm256_and_pd(upper_half, _mm256_set1_pd(4.0)));
  const __m256d swap = _mm256_cmp_pd(octant, _mm256_set1_pd(2.0), _CMP_EQ_OQ);

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP2), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP3), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  const __m256d cos_poly = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), polevl(zz, kCosCof),
                                           _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));
  const __m256d sin_poly = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), polevl(zz, kSinCof), z);

  s = _mm256_blendv_pd(sin_poly, cos_poly, swap);
  c = _mm256_blendv_pd(cos_poly, sin_poly, swap);

  const __m256d sin_flip = _mm256_xor_pd(_mm256_and_pd(upper_half, sign_bit), x_sign);
  const __m256d cos_flip = _mm256_and_pd(_mm256_xor_pd(upper_half, swap), sign_bit);
  s = _mm256_xor_pd(s, sin_flip);
  c = _mm256_xor_pd(c, cos_flip);
}

SecularSums secular_sums(const double* w, const double* d, std::size_t n, double shift, double tau) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vtau = _mm256_set1_pd(tau);
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d denom = _mm256_sub_pd(vtau, _mm256_sub_pd(_mm256_loadu_pd(d + k), vshift));
    const __m256d r = _mm256_div_pd(_mm256_loadu_pd(w + k), denom);
    acc1 = _mm256_add_pd(acc1, r);
    acc2 = _mm256_add_pd(acc2, _mm256_div_pd(r, denom));
  }
  SecularSums out{hsum(acc1), hsum(acc2)};
  for (; k < n; ++k) {
    const double denom = tau - (d[k] - shift);
    const double r = w[k] / denom;
    out.s1 += r;
    out.s2 += r / denom;
  }
  return out;
}

std::complex<double> resolvent_sum(const double* w, const double* d, std::size_t n,
                                   std::complex<double> z) {
  const __m256d zr = _mm256_set1_pd(z.real());
  const double zi = z.imag();
  const __m256d zi2 = _mm256_set1_pd(zi * zi);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_scale = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d dr = _mm256_sub_pd(zr, _mm256_loadu_pd(d + k));
    const __m256d scale = _mm256_div_pd(_mm256_loadu_pd(w + k), _mm256_fmadd_pd(dr, dr, zi2));
    acc_re = _mm256_fmadd_pd(scale, dr, acc_re);
    acc_scale = _mm256_add_pd(acc_scale, scale);
  }
  double re = hsum(acc_re);
  double im = -hsum(acc_scale) * zi;
  for (; k < n; ++k) {
    const double dr = z.real() - d[k];
    const double scale = w[k] / (dr * dr + zi * zi);
    re += scale * dr;
    im -= scale * zi;
  }
  return {re, im};
}

std::complex<double> spectral_sum(const double* w, const double* e, std::size_t n, double t) {
  const __m256d vt = _mm256_set1_pd(t);
  __m256d acc_c = _mm256_setzero_pd();
  __m256d acc_s = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d s, c;
    sincos4(_mm256_mul_pd(_mm256_loadu_pd(e + k), vt), s, c);
    const __m256d vw = _mm256_loadu_pd(w + k);
    acc_c = _mm256_fmadd_pd(vw, c, acc_c);
    acc_s = _mm256_fmadd_pd(vw, s, acc_s);
  }
  double re = hsum(acc_c);
  double im = -hsum(acc_s);
  if (k < n) {
    // Tail through the same vector sincos so every term uses one code path.
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double wb[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = 0; k + j < n; ++j) {
      buf[j] = e[k + j] * t;
      wb[j] = w[k + j];
    }
    __m256d s, c;
    sincos4(_mm256_load_pd(buf), s, c);
    const __m256d vw = _mm256_load_pd(wb);
    re += hsum(_mm256_mul_pd(vw, c));
    im -= hsum(_mm256_mul_pd(vw, s));
  }
  return {re, im};
}

void sincos(const double* x, std::size_t n, double* s, double* c) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d vs, vc;
    sincos4(_mm256_loadu_pd(x + k), vs, vc);
    _mm256_storeu_pd(s + k, vs);
    _mm256_storeu_pd(c + k, vc);
  }
  if (k < n) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double bs[4], bc[4];
    for (std::size_t j = 0; k + j < n; ++j) buf[j] = x[k + j];
    __m256d vs, vc;
    sincos4(_mm256_load_pd(buf), vs, vc);
    _mm256_store_pd(bs, vs);
    _mm256_store_pd(bc, vc);
    for (std::size_t j = 0; k + j < n; ++j) {
      s[k + j] = bs[j];
      c[k + j] = bc[j];
    }
  }
}

constexpr KernelTable kAvx2{"avx2", &secular_sums, &resolvent_sum, &spectral_sum, &sincos};

}  // namespace

const KernelTable& avx2_table_unchecked() noexcept { return kAvx2; }

}  // namespace bicwire::simd
