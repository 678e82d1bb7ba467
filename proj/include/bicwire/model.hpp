#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bicwire {

// Units: lattice constant d = 1, hbar = 1, wire on-site energy E_0 = 0.

/// Parity block of the inversion-symmetric two-impurity Hamiltonian.
/// s (symmetric) takes the + sign in every sector-dependent formula, p the - sign.
enum class Sector { p, s };

inline constexpr double sector_sign(Sector s) noexcept { return s == Sector::s ? 1.0 : -1.0; }

std::string to_string(Sector s);
Sector parse_sector(std::string_view text);

/// Physical parameters of one photon manifold. Donor at +x_D, acceptor at -x_D.
struct ModelParams {
  double W = 2.0;    // half-bandwidth, band = [-W, W]
  double g = 0.2;    // impurity-wire coupling (dimensionless)
  double T1 = 0.2;   // intra-atomic optical transition
  double T2 = 0.2;   // lower level -> wire optical transition
  double E_l = 0.0;  // lower impurity level
  double E_u = 0.1;  // upper impurity level
  int x_D = 2;
  int n = 0;         // photon manifold index

  bool operator==(const ModelParams&) const = default;
};

/// Unchecked parameter set as it arrives from a config file or the command line.
struct RawParams {
  double W = 2.0;
  double g = 0.2;
  double T1 = 0.2;
  double T2 = 0.2;
  double E_l = 0.0;
  double E_u = 0.1;
  double x_D = 2.0;
  double n = 0.0;
};

class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Checks every ModelParams invariant; throws ParameterError naming the first violation.
ModelParams validate(const RawParams& raw);
RawParams to_raw(const ModelParams& p);

/// Tight-binding band, E_k = -W cos k.
double band_energy(double k, double W) noexcept;

/// Discrete 2x2 block of one manifold and its rank-1 coupling to the continuum.
///
/// Basis is (|l, n+1>, |u, n>). The continuum couples to the vector
/// c = (lambda_l, lambda_u) with the self-energy Xi(z) / (2W), which makes
/// det(z - H - Xi c c^T / (2W)) identical to the pole equation.
struct EffectiveTwoLevel {
  double H_ll = 0.0;
  double H_uu = 0.0;
  double H_lu = 0.0;
  double lambda_u = 0.0;
  double lambda_l = 0.0;
  Sector sector = Sector::p;

  bool operator==(const EffectiveTwoLevel&) const = default;
};

EffectiveTwoLevel effective_two_level(const ModelParams& p, double omega, Sector sector) noexcept;

/// Q(z): the factor multiplying Xi(z) in the pole equation,
///   g^2 W (z - H_ll) + 2(n+1) g T1 T2 + (n+1) (T2^2 / W) (z - H_uu).
/// Written without dividing by g, so g = 0 is regular. Its real zero is the
/// Fano-cancellation condition.
template <class T>
T fano_coefficient(T z, const ModelParams& p, double omega) noexcept {
  const double np1 = p.n + 1.0;
  const double h_ll = p.E_l + np1 * omega;
  const double h_uu = p.E_u + p.n * omega;
  return p.g * p.g * p.W * (z - h_ll) + 2.0 * np1 * p.g * p.T1 * p.T2 +
         np1 * (p.T2 * p.T2 / p.W) * (z - h_uu);
}

/// P(z) = (z - H_ll)(z - H_uu) - H_lu^2, the decoupled two-level determinant.
template <class T>
T two_level_determinant(T z, const EffectiveTwoLevel& eff) noexcept {
  return (z - eff.H_ll) * (z - eff.H_uu) - eff.H_lu * eff.H_lu;
}

}  // namespace bicwire
