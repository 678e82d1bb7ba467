#include "bicwire/selfenergy.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace bicwire {

const char* to_string(Sheet s) noexcept { return s == Sheet::first ? "first" : "second"; }

cplx z_from_u(cplx u, double W) noexcept { return -0.5 * W * (u + 1.0 / u); }

BlochPoint u_from_z(cplx z, Sheet sheet, double W) {
  if (std::abs(z - W) < kBandEdgeEps || std::abs(z + W) < kBandEdgeEps) throw BandEdgeError(z);

  // Roots of u^2 + 2wu + 1 = 0 are -w +- sqrt(w^2 - 1); take the larger one
  // directly and the smaller as its reciprocal to avoid cancellation.
  const cplx w = z / W;
  const cplx s = std::sqrt(w * w - 1.0);
  cplx big = -(w + s);
  if (std::abs(-(w - s)) > std::abs(big)) big = -(w - s);
  const cplx small = 1.0 / big;

  cplx inner = small;
  cplx outer = big;
  if (std::abs(big) - std::abs(small) < 1e-12) {
    // Both roots on the unit circle to working precision: pick the boundary
    // value by the sign of Im z (Schwarz reflection, Im z = 0 counts as +).
    const bool upper = z.imag() >= 0.0;
    const bool small_up = small.imag() >= 0.0;
    if (small_up != upper) std::swap(inner, outer);
  }
  return BlochPoint{z, sheet == Sheet::first ? inner : outer, sheet};
}

cplx xi_at_u(cplx u, Sector sector, int x_D) noexcept {
  const cplx u2 = u * u;
  if (sector == Sector::p) {
    cplx sum = 0.0;
    cplx term = 1.0;
    for (int j = 0; j < x_D; ++j) {
      sum += term;
      term *= u2;
    }
    return -2.0 * u * sum;
  }
  cplx power = 1.0;
  for (int j = 0; j < x_D; ++j) power *= u2;
  return 2.0 * u * (1.0 + power) / (u2 - 1.0);
}

cplx xi(cplx z, Sector sector, Sheet sheet, int x_D, double W) {
  return xi_at_u(u_from_z(z, sheet, W).u, sector, x_D);
}

namespace {

struct IntegrandData {
  cplx z;
  double W;
  double sign;
  int x_D;
  bool imag_part;
};

double integrand(double k, void* raw) {
  const auto& d = *static_cast<const IntegrandData*>(raw);
  const cplx value = d.W * (1.0 + d.sign * std::cos(2.0 * k * d.x_D)) / (d.z - d.W * std::cos(k));
  return d.imag_part ? value.imag() : value.real();
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const noexcept { gsl_integration_workspace_free(w); }
};

}  // namespace

cplx xi_quadrature(cplx z, Sector sector, int x_D, double W) {
  if (!(std::abs(z.imag()) > 1e-6)) {
    throw std::domain_error("xi_quadrature needs |Im z| > 1e-6, got " + std::to_string(z.imag()));
  }
  constexpr std::size_t kLimit = 4000;
  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(kLimit));

  // Break the interval where the denominator is smallest, so narrow peaks for
  // small Im z are bracketed from the start.
  std::vector<double> points{-std::numbers::pi};
  const double c = z.real() / W;
  if (std::abs(c) < 1.0) {
    const double k0 = std::acos(c);
    points.push_back(-k0);
    points.push_back(k0);
  }
  points.push_back(std::numbers::pi);
  std::sort(points.begin(), points.end());

  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  double parts[2] = {0.0, 0.0};
  for (int part = 0; part < 2; ++part) {
    IntegrandData data{z, W, sector_sign(sector), x_D, part == 1};
    gsl_function f{&integrand, &data};
    double err = 0.0;
    const int status = gsl_integration_qagp(&f, points.data(), points.size(), 1e-13, 1e-12,
                                            kLimit, ws.get(), &parts[part], &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND) {
      gsl_set_error_handler(previous);
      throw std::runtime_error(std::string("xi_quadrature: ") + gsl_strerror(status));
    }
  }
  gsl_set_error_handler(previous);
  return cplx(parts[0], parts[1]) / (2.0 * std::numbers::pi);
}

}  // namespace bicwire
