#pragma once

#include <complex>
#include <stdexcept>

#include "bicwire/model.hpp"

namespace bicwire {

using cplx = std::complex<double>;

/// Riemann sheet of the resolvent. The physical (first) sheet is where the
/// self-energy decays like W/z at infinity.
enum class Sheet { first, second };

const char* to_string(Sheet s) noexcept;

/// Energy z together with its Bloch variable u = e^{i theta}, z = -(W/2)(u + 1/u).
/// First sheet <-> |u| < 1, second sheet <-> |u| > 1; on the band itself
/// (real z, |z| < W) both roots sit on the unit circle and the first sheet is
/// the boundary value from Im z -> 0+, i.e. Im u > 0.
struct BlochPoint {
  cplx z;
  cplx u;
  Sheet sheet = Sheet::first;
};

class BandEdgeError : public std::domain_error {
 public:
  explicit BandEdgeError(cplx z)
      : std::domain_error("self-energy is singular at the band edge"), z_(z) {}
  cplx z() const noexcept { return z_; }

 private:
  cplx z_;
};

inline constexpr double kBandEdgeEps = 1e-10;

/// Root of u^2 + (2z/W) u + 1 = 0 on the requested sheet. Throws BandEdgeError
/// within kBandEdgeEps of z = +-W.
BlochPoint u_from_z(cplx z, Sheet sheet, double W);

/// Inverse map z(u) = -(W/2)(u + 1/u).
cplx z_from_u(cplx u, double W) noexcept;

/// Xi(u) = 2u (1 +- u^{2 x_D}) / (u^2 - 1), + for s, - for p.
/// The p-sector form is evaluated as -2u (1 + u^2 + ... + u^{2(x_D-1)}), which
/// has no removable singularity at u = +-1.
cplx xi_at_u(cplx u, Sector sector, int x_D) noexcept;

/// Closed-form self-energy Xi^{p,s}(z) on the given sheet.
cplx xi(cplx z, Sector sector, Sheet sheet, int x_D, double W);

/// Independent first-sheet oracle:
///   (1/2pi) Int_{-pi}^{pi} dk W (1 +- cos(2 k x_D)) / (z - W cos k)
/// by adaptive Gauss-Kronrod quadrature. Requires |Im z| > 1e-6.
cplx xi_quadrature(cplx z, Sector sector, int x_D, double W);

}  // namespace bicwire
