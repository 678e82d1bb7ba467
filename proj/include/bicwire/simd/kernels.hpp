#pragma once

// Data-parallel inner loops of the lattice oracle.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2+FMA
// variant chosen at runtime. Results agree to rounding (summation order differs);
// tests/test_kernels.cpp holds the equivalence checks.

#include <complex>
#include <cstddef>
#include <string_view>

namespace bicwire::simd {

struct SecularSums {
  double s1 = 0.0;  // sum w_k / (tau - (d_k - shift))
  double s2 = 0.0;  // sum w_k / (tau - (d_k - shift))^2
};

struct KernelTable {
  const char* name;

  /// Secular-equation sums for an arrowhead matrix, in the shifted variable
  /// tau = lambda - shift so that lambda - d_k is formed without cancellation.
  SecularSums (*secular_sums)(const double* w, const double* d, std::size_t n, double shift,
                              double tau);

  /// sum w_k / (z - d_k) for complex z.
  std::complex<double> (*resolvent_sum)(const double* w, const double* d, std::size_t n,
                                        std::complex<double> z);

  /// sum w_k exp(-i e_k t).
  std::complex<double> (*spectral_sum)(const double* w, const double* e, std::size_t n, double t);

  /// Elementwise sin and cos; the AVX2 table uses its own vector sincos.
  void (*sincos)(const double* x, std::size_t n, double* s, double* c);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// Chosen once: AVX2 when available, unless BICWIRE_KERNELS=scalar.
const KernelTable& active_kernels() noexcept;

/// Looks a table up by name ("scalar", "avx2"); nullptr if unavailable.
const KernelTable* find_kernels(std::string_view name) noexcept;

}  // namespace bicwire::simd
