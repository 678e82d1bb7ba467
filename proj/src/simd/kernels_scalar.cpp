#include <cmath>

#include "bicwire/simd/kernels.hpp"

namespace bicwire::simd {
namespace {

SecularSums secular_sums(const double* w, const double* d, std::size_t n, double shift, double tau) {
  SecularSums out;
  for (std::size_t k = 0; k < n; ++k) {
    const double denom = tau - (d[k] - shift);
    const double r = w[k] / denom;
    out.s1 += r;
    out.s2 += r / denom;
  }
  return out;
}

std::complex<double> resolvent_sum(const double* w, const double* d, std::size_t n,
                                   std::complex<double> z) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dr = z.real() - d[k];
    const double scale = w[k] / (dr * dr + z.imag() * z.imag());
    re += scale * dr;
    im -= scale * z.imag();
  }
  return {re, im};
}

std::complex<double> spectral_sum(const double* w, const double* e, std::size_t n, double t) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = e[k] * t;
    re += w[k] * std::cos(phase);
    im -= w[k] * std::sin(phase);
  }
  return {re, im};
}

void sincos(const double* x, std::size_t n, double* s, double* c) {
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = std::sin(x[k]);
    c[k] = std::cos(x[k]);
  }
}

constexpr KernelTable kScalar{"scalar", &secular_sums, &resolvent_sum, &spectral_sum, &sincos};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace bicwire::simd
