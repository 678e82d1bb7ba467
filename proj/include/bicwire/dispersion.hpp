#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicwire/model.hpp"
#include "bicwire/polynomial.hpp"
#include "bicwire/selfenergy.hpp"

namespace bicwire {

/// Classification of one root of the pole equation.
///   resonance      second sheet, Im z < 0 (decaying state, Gamma = -Im z)
///   antiresonance  second sheet, Im z > 0 (time-reversed partner of a resonance)
///   bound          first sheet, real z outside the band
///   virtual_state  second sheet, real z outside the band
///   bic            real z inside the band, |u| = 1
///   band_artifact  root of the polynomial that does not solve the pole equation
enum class PoleKind { resonance, antiresonance, bound, virtual_state, bic, band_artifact };

const char* to_string(PoleKind k) noexcept;

struct Pole {
  cplx z;
  cplx u;
  Sheet sheet = Sheet::second;
  double gamma = 0.0;     // |Im z|
  double residual = 0.0;  // |D| at the polished root
  PoleKind kind = PoleKind::resonance;
};

/// Residual bound every accepted pole satisfies: 1e-9 * max(1, |z|^2).
double residual_tolerance(cplx z) noexcept;

class SolverError : public std::runtime_error {
 public:
  SolverError(double omega, const std::string& what)
      : std::runtime_error(what), omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// D(z) = P(z) - Xi(z) Q(z) with Xi taken on the given sheet.
cplx dispersion_value(cplx z, double omega, const ModelParams& p, Sector sector, Sheet sheet);

/// D as a function of the Bloch variable; no sheet bookkeeping needed.
cplx dispersion_at_u(cplx u, double omega, const ModelParams& p, Sector sector);

/// det(z - H - Xi(z) c c^T / (2W)) built from the EffectiveTwoLevel couplings.
/// Algebraically identical to dispersion_value; kept as the second route.
cplx dispersion_det_form(cplx z, double omega, const ModelParams& p, Sector sector, Sheet sheet);

/// Pi(u) = u^2 [(u^2 - 1) P(z(u)) - 2u (1 +- u^{2 x_D}) Q(z(u))], real coefficients,
/// degree 2 x_D + 4. Both sheets' poles are its roots.
RealPolynomial build_poly(double omega, const ModelParams& p, Sector sector);

struct PoleSet {
  double omega = 0.0;
  std::vector<Pole> poles;     // physical roots, each BIC once, sorted by (Re z, Im z)
  std::vector<Pole> tracked;   // all accepted roots (a BIC appears as u and conj(u))
  std::vector<Pole> rejected;  // band artifacts removed by the filter
};

/// Every root of the pole equation at driving frequency omega.
/// Throws SolverError if a root that is not a band artifact misses the residual bound.
PoleSet solve_poles(double omega, const ModelParams& p, Sector sector);

struct SweepRow {
  double omega_plus_el = 0.0;
  int branch_id = 0;
  cplx z;
  double gamma = 0.0;
  cplx u;
  double residual = 0.0;
  PoleKind kind = PoleKind::resonance;
};

/// Branch-tracked poles over an omega grid. Rows ordered by (omega, branch_id).
struct SweepTable {
  std::vector<SweepRow> rows;
};

struct SweepOptions {
  unsigned workers = 0;       // 0: one per hardware thread
  int max_refine_depth = 6;   // midpoint insertions per original step
  double jump_factor = 5.0;   // refine a step whose match distance exceeds this x median
};

/// Solves every grid point (concurrently, result independent of worker count),
/// inserts midpoints where branch continuation jumps, then assigns branch ids by
/// greedy nearest-neighbour matching in the Bloch variable u.
SweepTable sweep(std::span<const double> omega_grid, const ModelParams& p, Sector sector,
                 const SweepOptions& options = {});

struct GammaZero {
  double omega_plus_el = 0.0;
  cplx z;
  double gamma = 0.0;
  int branch_id = -1;
};

/// Minimises |Im z| of the pole nearest z_ref over [omega_lo, omega_hi]:
/// golden section, then local cubic least-squares fits around the minimum.
GammaZero refine_gamma_minimum(double omega_lo, double omega_hi, cplx z_ref, const ModelParams& p,
                               Sector sector);

/// Interior in-band local minima of Gamma on each branch, refined; those with
/// refined Gamma below gamma_tol are returned (deduplicated, ascending omega).
std::vector<GammaZero> find_gamma_zeros(const SweepTable& table, const ModelParams& p, Sector sector,
                                        double gamma_tol = 1e-10);

/// Smallest Gamma among in-band complex/BIC rows with omega_plus_el in [lo, hi].
double min_in_band_gamma(const SweepTable& table, double W, double lo, double hi);

}  // namespace bicwire
