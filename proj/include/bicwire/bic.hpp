#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bicwire/model.hpp"

namespace bicwire {

enum class BicKind { static_bic, dynamic_bic };

const char* to_string(BicKind k) noexcept;

/// Closed-form bound state in the continuum.
///
/// Static BICs come from a zero of the self-energy (interference between the
/// two impurity sites) at z0 = -W cos(m pi / (2 x_D)); their frequency does not
/// depend on g or T2. Dynamic BICs come from the Fano cancellation Q(z0) = 0
/// between the T1 and T2 channels.
struct BicPrediction {
  BicKind kind = BicKind::static_bic;
  Sector sector = Sector::p;
  std::optional<int> m;  // static only
  double z0 = 0.0;
  double omega = 0.0;    // driving frequency (not shifted by E_l)
  bool in_band = false;  // |z0| <= W
  double residual = 0.0; // max over sheets of |D(z0, omega)|
  // Dynamic only: which root of the decoupled two-level formula z0 equals
  // (+1 or -1) and how closely.
  int two_level_root_sign = 0;
  double two_level_match_error = 0.0;
};

struct StaticLevel {
  int m = 0;
  double z0 = 0.0;
};

/// All admissible m in (0, 2 x_D): even for p, odd for s. Band edges excluded.
std::vector<StaticLevel> static_bic_energies(int x_D, Sector sector, double W);

enum class FrequencyStatus { ok, no_real_solution, degenerate_denominator, any_frequency };

const char* to_string(FrequencyStatus s) noexcept;

struct StaticFrequencies {
  FrequencyStatus status = FrequencyStatus::ok;
  std::vector<double> omegas;  // ascending
};

/// Real roots in omega of [z0 - (n+1)omega - E_l][z0 - n omega - E_u] - (n+1) T1^2 = 0.
/// Linear for n = 0; quadratic otherwise.
StaticFrequencies static_bic_frequencies(double z0, const ModelParams& p);

/// The two real eigenvalues of the decoupled 2x2 block at frequency omega,
/// ((2n+1) omega + E_l + E_u +- sqrt((omega + E_l - E_u)^2 + 4 (n+1) T1^2)) / 2.
std::pair<double, double> two_level_real_roots(double omega, const ModelParams& p) noexcept;

struct DynamicBic {
  std::optional<BicPrediction> prediction;
  std::string reason;  // set when no dynamic BIC applies
};

/// Omega* = E_u - E_l - W g T1 / T2 + (n+1) T1 T2 / (W g) and z0 from the linear
/// condition Q(z0) = 0. Not applicable unless g > 0 and T2 > 0.
DynamicBic dynamic_bic(const ModelParams& p, Sector sector = Sector::p);

/// Static predictions (every m, every real frequency) followed by the dynamic one.
std::vector<BicPrediction> predict_bics(const ModelParams& p, Sector sector);

struct BicVerification {
  double residual_first = 0.0;
  double residual_second = 0.0;
  bool residual_ok = false;
  bool checked_solver = false;  // false when the prediction is out of band
  bool solver_found = false;
  double solver_distance = 0.0;
  std::string message;
  bool passed() const noexcept { return residual_ok && (!checked_solver || solver_found); }
};

/// Evaluates D(z0, omega) on both sheets and, for in-band predictions, checks
/// that solve_poles reports a BIC pole within 1e-9 of z0.
BicVerification verify_bic(const BicPrediction& pred, const ModelParams& p);

}  // namespace bicwire
