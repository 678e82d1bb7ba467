#include "bicwire/bic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bicwire/dispersion.hpp"

namespace bicwire {

const char* to_string(BicKind k) noexcept { return k == BicKind::static_bic ? "static" : "dynamic"; }

const char* to_string(FrequencyStatus s) noexcept {
  switch (s) {
    case FrequencyStatus::ok: return "ok";
    case FrequencyStatus::no_real_solution: return "no_real_solution";
    case FrequencyStatus::degenerate_denominator: return "degenerate_denominator";
    case FrequencyStatus::any_frequency: return "any_frequency";
  }
  return "unknown";
}

std::vector<StaticLevel> static_bic_energies(int x_D, Sector sector, double W) {
  std::vector<StaticLevel> out;
  const int first = sector == Sector::p ? 2 : 1;
  for (int m = first; m < 2 * x_D; m += 2) {
    // cos written as sin of the complement so m = x_D gives exactly 0.
    out.push_back({m, -W * std::sin((x_D - m) * std::numbers::pi / (2.0 * x_D))});
  }
  return out;
}

StaticFrequencies static_bic_frequencies(double z0, const ModelParams& p) {
  const double np1 = p.n + 1.0;
  const double a = z0 - p.E_l;
  const double b = z0 - p.E_u;
  const double t1sq = np1 * p.T1 * p.T1;
  StaticFrequencies out;

  if (p.n == 0) {
    // (a - omega) b - T1^2 = 0
    if (b == 0.0) {
      out.status = t1sq == 0.0 ? FrequencyStatus::any_frequency : FrequencyStatus::degenerate_denominator;
      return out;
    }
    out.omegas.push_back(a - t1sq / b);
    return out;
  }

  // n(n+1) omega^2 - (a n + b (n+1)) omega + a b - (n+1) T1^2 = 0
  const double qa = p.n * np1;
  const double qb = -(a * p.n + b * np1);
  const double qc = a * b - t1sq;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    out.status = FrequencyStatus::no_real_solution;
    return out;
  }
  const double root = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(root, qb));
  if (q == 0.0) {
    out.omegas = {0.0};
  } else {
    out.omegas = {q / qa, qc / q};
    if (disc == 0.0) out.omegas.resize(1);
  }
  std::sort(out.omegas.begin(), out.omegas.end());
  return out;
}

std::pair<double, double> two_level_real_roots(double omega, const ModelParams& p) noexcept {
  const double np1 = p.n + 1.0;
  const double centre = (2.0 * p.n + 1.0) * omega + p.E_l + p.E_u;
  const double detune = omega + p.E_l - p.E_u;
  const double root = std::sqrt(detune * detune + 4.0 * np1 * p.T1 * p.T1);
  return {0.5 * (centre + root), 0.5 * (centre - root)};
}

namespace {

double both_sheet_residual(double z0, double omega, const ModelParams& p, Sector sector,
                           double* first = nullptr, double* second = nullptr) {
  const double r1 = std::abs(dispersion_value(z0, omega, p, sector, Sheet::first));
  const double r2 = std::abs(dispersion_value(z0, omega, p, sector, Sheet::second));
  if (first) *first = r1;
  if (second) *second = r2;
  return std::max(r1, r2);
}

double safe_residual(double z0, double omega, const ModelParams& p, Sector sector) {
  try {
    return both_sheet_residual(z0, omega, p, sector);
  } catch (const BandEdgeError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

DynamicBic dynamic_bic(const ModelParams& p, Sector sector) {
  DynamicBic out;
  if (!(p.g > 0.0) || !(p.T2 > 0.0)) {
    out.reason = "no dynamic BIC: requires g > 0 and T2 > 0";
    return out;
  }
  const double np1 = p.n + 1.0;
  const double omega = p.E_u - p.E_l - p.W * p.g * p.T1 / p.T2 + np1 * p.T1 * p.T2 / (p.W * p.g);

  // Q(z) = slope * z + intercept
  const double slope = p.g * p.g * p.W + np1 * p.T2 * p.T2 / p.W;
  const double intercept = fano_coefficient(0.0, p, omega);
  const double z0 = -intercept / slope;

  BicPrediction pred;
  pred.kind = BicKind::dynamic_bic;
  pred.sector = sector;
  pred.z0 = z0;
  pred.omega = omega;
  pred.in_band = std::abs(z0) <= p.W;

  const auto [plus, minus] = two_level_real_roots(omega, p);
  const double dp = std::abs(z0 - plus);
  const double dm = std::abs(z0 - minus);
  pred.two_level_root_sign = dp <= dm ? +1 : -1;
  pred.two_level_match_error = std::min(dp, dm);
  pred.residual = safe_residual(z0, omega, p, sector);
  out.prediction = pred;
  return out;
}

std::vector<BicPrediction> predict_bics(const ModelParams& p, Sector sector) {
  std::vector<BicPrediction> out;
  for (const StaticLevel& level : static_bic_energies(p.x_D, sector, p.W)) {
    const StaticFrequencies freqs = static_bic_frequencies(level.z0, p);
    for (double omega : freqs.omegas) {
      BicPrediction pred;
      pred.kind = BicKind::static_bic;
      pred.sector = sector;
      pred.m = level.m;
      pred.z0 = level.z0;
      pred.omega = omega;
      pred.in_band = std::abs(level.z0) <= p.W;
      pred.residual = safe_residual(level.z0, omega, p, sector);
      out.push_back(pred);
    }
  }
  const DynamicBic dyn = dynamic_bic(p, sector);
  if (dyn.prediction) out.push_back(*dyn.prediction);
  return out;
}

BicVerification verify_bic(const BicPrediction& pred, const ModelParams& p) {
  BicVerification v;
  try {
    both_sheet_residual(pred.z0, pred.omega, p, pred.sector, &v.residual_first, &v.residual_second);
  } catch (const BandEdgeError&) {
    v.message = "z0 at band edge";
    return v;
  }
  const double residual = std::max(v.residual_first, v.residual_second);
  // Out of band the second-sheet value is irrelevant: a real z0 with |z0| > W is a
  // bound or virtual state on one sheet only.
  v.residual_ok = pred.in_band ? residual < 1e-10
                               : std::min(v.residual_first, v.residual_second) < 1e-10;
  if (!pred.in_band) {
    v.message = "bound state outside band, not a BIC";
    return v;
  }
  v.checked_solver = true;
  const PoleSet set = solve_poles(pred.omega, p, pred.sector);
  v.solver_distance = std::numeric_limits<double>::infinity();
  for (const Pole& pole : set.poles) {
    if (pole.kind != PoleKind::bic) continue;
    v.solver_distance = std::min(v.solver_distance, std::abs(pole.z - pred.z0));
  }
  v.solver_found = v.solver_distance < 1e-9;
  v.message = v.passed() ? "ok" : "solver did not reproduce the predicted BIC";
  return v;
}

}  // namespace bicwire
