#pragma once

// Finite-wire exact diagonalization used to cross-check the pole solver.
//
// One photon manifold, one parity sector: two discrete levels (l, u) coupled to
// M wire modes on the midpoint grid k_j = pi (j - 1/2) / M. Both levels couple
// to mode j through the same profile phi_j (sin(k x_D) for p, cos(k x_D) for s),
//   t_l(j) = lambda_l phi_j / sqrt(M),   t_u(j) = lambda_u phi_j / sqrt(M),
// so sum_j t^2 / (z - eps_j) tends to lambda^2 Xi(z) / (2W).

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bicwire/bic.hpp"
#include "bicwire/dispersion.hpp"
#include "bicwire/model.hpp"

namespace bicwire {

struct LatticeSystem {
  ModelParams params;
  double omega = 0.0;
  Sector sector = Sector::p;
  int M = 0;
  EffectiveTwoLevel block;
  std::vector<double> k;    // ascending
  std::vector<double> eps;  // -W cos k, ascending
  std::vector<double> phi;

  double t_l(std::size_t j) const;
  double t_u(std::size_t j) const;

  /// (M+2)x(M+2) matrix, basis order (l, u, mode 1 .. mode M). Test use only.
  Eigen::MatrixXd dense() const;
};

/// Requires M >= 100.
LatticeSystem build_lattice(const ModelParams& p, double omega, Sector sector, int M);

/// sum_j t_u(j)^2 / (z - eps_j); compare with lambda_u^2 Xi(z) / (2W).
cplx induced_self_energy(const LatticeSystem& sys, cplx z);

/// Eigen-decomposition of a LatticeSystem.
///
/// The couplings to l and u are parallel, so in the rotated discrete basis
/// a = c/|c|, b = perp(c) only a talks to the wire and the matrix is a rank-one
/// arrowhead. Eigenvalues come from its secular equation, eigenvectors from the
/// closed form; nothing of size (M+2)^2 is ever stored.
class Spectrum {
 public:
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }  // ascending

  /// Components of eigenvector i on |l> and |u>.
  double amp_l(std::size_t i) const { return amp_l_[i]; }
  double amp_u(std::size_t i) const { return amp_u_[i]; }
  /// |<l|v>|^2 + |<u|v>|^2
  double discrete_weight(std::size_t i) const;

  /// Normalised eigenvector i in the basis of LatticeSystem::dense().
  Eigen::VectorXd vector(std::size_t i) const;

  std::size_t nearest(double z) const;

 private:
  friend Spectrum diagonalize(const LatticeSystem& sys);

  struct Source {
    enum Kind { secular, deflated_mode, deflated_b, merged, block } kind = secular;
    double shift = 0.0;  // secular: lambda = shift + tau
    double tau = 0.0;
    std::size_t index = 0;  // deflated mode index or 2x2 column
    double norm = 1.0;
  };

  std::vector<double> values_;
  std::vector<double> amp_l_;
  std::vector<double> amp_u_;
  std::vector<Source> source_;

  // Rotated problem, needed to rebuild full vectors.
  double a_l_ = 1.0, a_u_ = 0.0;  // a = c/|c|; b = (-a_u, a_l)
  double z_b_ = 0.0;              // coupling a <-> b
  double d_b_ = 0.0;
  std::vector<double> z_modes_;   // coupling a <-> mode j
  std::vector<double> d_modes_;
};

Spectrum diagonalize(const LatticeSystem& sys);

struct ScanPoint {
  int M = 0;
  bool candidate = false;  // an eigenvalue within W/M of z0
  double eigenvalue = 0.0;
  double gap = 0.0;        // |eigenvalue - z0|
  double weight = 0.0;
};

struct ScanReport {
  double z0 = 0.0;
  double omega = 0.0;
  std::vector<ScanPoint> points;
  std::vector<double> ratios;  // per doubling of M: (w_{k+1}/w_k)^(ln 2 / ln(M_{k+1}/M_k))
  bool confirmed = false;      // every point a candidate, every ratio in [0.8, 1.25]
  std::string message;
};

/// For each M, the eigenpair nearest z0 and its discrete weight. A true BIC keeps
/// a finite weight; a continuum state near z0 has weight ~ 1/M.
/// M_list must be increasing with at least 3 entries.
ScanReport bound_state_scan(double z0, double omega, const ModelParams& p, Sector sector,
                            std::span<const int> M_list);
ScanReport bound_state_scan(const BicPrediction& pred, const ModelParams& p,
                            std::span<const int> M_list);

struct SurvivalTrace {
  std::vector<double> t;
  std::vector<double> P;
};

/// P(t) = |<psi|e^{-iHt}|psi>|^2 for psi = (psi_l, psi_u) on the discrete block
/// (normalised internally). Throws std::invalid_argument if max t > M / (4W),
/// beyond which the wire's finite size shows up as recurrences.
SurvivalTrace survival_probability(const LatticeSystem& sys, const Spectrum& spec, cplx psi_l,
                                   cplx psi_u, std::span<const double> t_grid);

struct DecayFit {
  double rate = 0.0;      // -d ln P / dt
  double stderr_rate = 0.0;
  double rms = 0.0;       // residual of ln P about the fitted line
  std::size_t points = 0;
  bool no_decay = false;
  bool unreliable = false;  // oscillation-dominated: rms residual large against the decay
};

/// Least-squares slope of ln P over t in [t_lo, t_hi]. Throws std::invalid_argument
/// when the window holds fewer than 3 samples or P <= 1e-12 inside it.
DecayFit fit_decay(const SurvivalTrace& trace, double t_lo, double t_hi);

/// Discrete-block part of the dressed state of a pole: the null vector of
/// z - H - Xi(u) c c^T / (2W). Normalised, (psi_l, psi_u).
std::pair<cplx, cplx> dressed_state(const Pole& pole, double omega, const ModelParams& p,
                                    Sector sector);

struct DecayComparison {
  double omega = 0.0;
  std::optional<Pole> pole;  // slowest in-band resonance
  double t_lo = 0.0;
  double t_hi = 0.0;
  DecayFit fit;
  double ratio = 0.0;        // fitted rate / (2 Gamma)
  bool passed = false;       // ratio in [0.9, 1.1] and fit reliable
  std::string message;
};

/// Time-domain decay of the slowest in-band resonance's dressed state against 2 Gamma.
DecayComparison compare_decay(double omega, const ModelParams& p, Sector sector, int M);

}  // namespace bicwire
