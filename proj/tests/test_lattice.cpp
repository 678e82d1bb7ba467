#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bicwire/bic.hpp"
#include "bicwire/dispersion.hpp"
#include "bicwire/lattice.hpp"
#include "bicwire/selfenergy.hpp"

using namespace bicwire;

namespace {

ModelParams preset(int x_D, double g, double T2 = 0.2) {
  ModelParams p;
  p.x_D = x_D;
  p.g = g;
  p.T2 = T2;
  return p;
}

// Dense LAPACK-style solve as the reference for the arrowhead solver.
void compare_with_dense(const LatticeSystem& sys) {
  const Spectrum spec = diagonalize(sys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.dense());
  REQUIRE(spec.size() == static_cast<std::size_t>(sys.M + 2));
  double worst_value = 0.0, worst_vector = 0.0, worst_weight = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const Eigen::Index ii = static_cast<Eigen::Index>(i);
    worst_value = std::max(worst_value, std::abs(spec.values()[i] - es.eigenvalues()(ii)));
    const Eigen::VectorXd v = spec.vector(i);
    const auto ref = es.eigenvectors().col(ii);
    worst_vector = std::max(worst_vector, 1.0 - std::abs(v.dot(ref)));
    const double w_ref = ref(0) * ref(0) + ref(1) * ref(1);
    worst_weight = std::max(worst_weight, std::abs(spec.discrete_weight(i) - w_ref));
  }
  CHECK(worst_value < 1e-12);
  CHECK(worst_vector < 1e-10);
  CHECK(worst_weight < 1e-10);
}

}  // namespace

TEST_CASE("construction") {
  const ModelParams p = preset(2, 0.2);
  CHECK_THROWS(build_lattice(p, 0.4, Sector::p, 99));
  const LatticeSystem sys = build_lattice(p, 0.4, Sector::p, 1000);
  const Eigen::MatrixXd h = sys.dense();
  CHECK(h.rows() == 1002);
  CHECK((h - h.transpose()).norm() == 0.0);
  // Arrow shape: the wire block is diagonal.
  CHECK(h.bottomRightCorner(1000, 1000).isDiagonal());
  CHECK(sys.k.front() == doctest::Approx(std::numbers::pi * 0.5 / 1000));
  for (std::size_t j = 1; j < sys.eps.size(); ++j) CHECK(sys.eps[j] > sys.eps[j - 1]);

  const LatticeSystem off = build_lattice(preset(2, 0.0, 0.0), 0.4, Sector::p, 200);
  for (std::size_t j = 0; j < 200; ++j) {
    CHECK(off.t_l(j) == 0.0);
    CHECK(off.t_u(j) == 0.0);
  }
}

TEST_CASE("induced self-energy approaches the closed form") {
  const ModelParams p = preset(2, 0.2);
  const cplx z(0.3, 0.5);
  for (Sector s : {Sector::p, Sector::s}) {
    const LatticeSystem sys = build_lattice(p, 0.4, s, 4000);
    const double lu = sys.block.lambda_u;
    const cplx closed = lu * lu * xi(z, s, Sheet::first, p.x_D, p.W) / (2.0 * p.W);
    CHECK(std::abs(induced_self_energy(sys, z) - closed) / std::abs(closed) < 1e-3);
  }
}

TEST_CASE("arrowhead solver against dense diagonalization") {
  SUBCASE("fig2 at the BICs and off them") {
    for (double omega : {0.4, -0.2, 0.8, -1.0}) compare_with_dense(build_lattice(preset(2, 0.2), omega, Sector::p, 150));
  }
  SUBCASE("s sector, x_D = 3") { compare_with_dense(build_lattice(preset(3, 0.3), 0.1, Sector::s, 160)); }
  SUBCASE("T2 = 0: only the upper level couples") { compare_with_dense(build_lattice(preset(2, 0.2, 0.0), 0.3, Sector::p, 150)); }
  SUBCASE("g = 0: only the lower level couples") { compare_with_dense(build_lattice(preset(2, 0.0, 0.3), 0.3, Sector::p, 150)); }
  SUBCASE("wire decoupled") { compare_with_dense(build_lattice(preset(2, 0.0, 0.0), 0.3, Sector::p, 120)); }
  SUBCASE("odd M puts a node of sin(2k) on the grid") {
    const LatticeSystem sys = build_lattice(preset(2, 0.2), 0.8, Sector::p, 151);
    CHECK(std::abs(sys.phi[75]) < 1e-15);
    compare_with_dense(sys);
  }
  SUBCASE("decoupled level degenerate with a wire mode") {
    // With T2 = 0 the orthogonal combination is |l>, at H_ll = Omega + E_l.
    ModelParams p = preset(2, 0.2, 0.0);
    const LatticeSystem probe = build_lattice(p, 0.0, Sector::p, 150);
    compare_with_dense(build_lattice(p, probe.eps[40] - p.E_l, Sector::p, 150));
  }
}

TEST_CASE("large-M eigenvectors stay orthonormal") {
  const LatticeSystem sys = build_lattice(preset(2, 0.2), 0.8, Sector::p, 1000);
  const Spectrum spec = diagonalize(sys);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < spec.size(); i += 37) {
    const Eigen::VectorXd a = spec.vector(i);
    worst = std::max(worst, std::abs(a.norm() - 1.0));
    worst = std::max(worst, std::abs(a.dot(spec.vector(i + 1))));
    worst = std::max(worst, std::abs(a.dot(spec.vector((i * 7 + 13) % spec.size()))) *
                                ((i * 7 + 13) % spec.size() != i));
  }
  CHECK(worst < 1e-10);
  // Residual of one eigenpair against the dense matrix.
  const Eigen::MatrixXd h = sys.dense();
  const std::size_t k = spec.nearest(0.04);
  CHECK((h * spec.vector(k) - spec.values()[k] * spec.vector(k)).norm() < 1e-12);
}

TEST_CASE("spectral support") {
  const ModelParams p = preset(2, 0.4);
  const LatticeSystem sys = build_lattice(p, 1.6, Sector::p, 500);
  const Spectrum spec = diagonalize(sys);
  const double lo = std::min({-p.W, sys.block.H_ll, sys.block.H_uu});
  const double hi = std::max({p.W, sys.block.H_ll, sys.block.H_uu});
  const double safety = 2.0 * (std::abs(sys.block.H_lu) + sys.block.lambda_l + sys.block.lambda_u);
  CHECK(spec.values().front() > lo - safety);
  CHECK(spec.values().back() < hi + safety);
  int inside = 0;
  for (double v : spec.values()) inside += std::abs(v) < p.W;
  CHECK(inside >= 498);
}

TEST_CASE("bound-state scans separate BICs from the continuum") {
  const ModelParams p = preset(2, 0.2);
  const std::vector<int> Ms{500, 1000, 2000};

  const ScanReport dyn = bound_state_scan(-0.3, -0.2, p, Sector::p, Ms);
  CHECK(dyn.confirmed);
  for (const ScanPoint& pt : dyn.points) CHECK(std::abs(pt.eigenvalue + 0.3) < 1e-3);

  const ScanReport stat = bound_state_scan(0.0, 0.4, p, Sector::p, Ms);
  CHECK(stat.confirmed);
  CHECK(stat.points.back().weight > 0.5);

  const ScanReport off = bound_state_scan(-0.3, 0.0, p, Sector::p, Ms);
  CHECK_FALSE(off.confirmed);
  for (double r : off.ratios) CHECK(std::abs(r - 0.5) < 0.15);

  CHECK_THROWS(bound_state_scan(-0.3, -0.2, p, Sector::p, std::vector<int>{500, 1000}));
  CHECK_THROWS(bound_state_scan(-0.3, -0.2, p, Sector::p, std::vector<int>{500, 400, 1000}));

  BicPrediction out_of_band;
  out_of_band.in_band = false;
  CHECK_THROWS(bound_state_scan(out_of_band, p, Ms));
}

TEST_CASE("survival probability basics") {
  const ModelParams p = preset(2, 0.2);
  const LatticeSystem sys = build_lattice(p, 0.8, Sector::p, 400);
  const Spectrum spec = diagonalize(sys);
  const std::vector<double> t{0.0, 1.0, 10.0, 50.0};
  const SurvivalTrace tr = survival_probability(sys, spec, 0.6, cplx(0.0, 0.8), t);
  CHECK(tr.P[0] == doctest::Approx(1.0).epsilon(1e-13));
  for (double v : tr.P) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS(survival_probability(sys, spec, 1.0, 0.0, std::vector<double>{0.0, 50.1}));
  CHECK_THROWS(survival_probability(sys, spec, 0.0, 0.0, t));
}

TEST_CASE("decoupled wire: Rabi oscillation without net decay") {
  const ModelParams p = preset(2, 0.0, 0.0);
  const double omega = 0.25;
  const LatticeSystem sys = build_lattice(p, omega, Sector::p, 400);
  const Spectrum spec = diagonalize(sys);
  const EffectiveTwoLevel& e = sys.block;
  const double delta = e.H_ll - e.H_uu;
  const double split = std::sqrt(delta * delta + 4.0 * e.H_lu * e.H_lu);
  const double period = 2.0 * std::numbers::pi / split;
  std::vector<double> t;
  for (int k = 0; k * period <= sys.M / (4.0 * p.W); ++k) t.push_back(k * period);
  const SurvivalTrace tr = survival_probability(sys, spec, 1.0, 0.0, t);
  for (double v : tr.P) CHECK(std::abs(v - 1.0) < 1e-10);
  // Minimum at half period, two-level formula.
  const SurvivalTrace half = survival_probability(sys, spec, 1.0, 0.0, std::vector<double>{0.5 * period});
  CHECK(half.P[0] == doctest::Approx(delta * delta / (split * split)).epsilon(1e-10));
}

TEST_CASE("decay fits on synthetic traces") {
  SurvivalTrace exact, wiggle, flat;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.1 * i;
    exact.t.push_back(t);
    exact.P.push_back(std::exp(-0.2 * t));
    wiggle.t.push_back(t);
    wiggle.P.push_back(std::exp(-0.2 * t) * (1.0 + 0.01 * std::cos(5.0 * t)));
    flat.t.push_back(t);
    flat.P.push_back(1.0);
  }
  const DecayFit a = fit_decay(exact, 0.0, 40.0);
  CHECK(std::abs(a.rate - 0.2) < 1e-12);
  CHECK_FALSE(a.no_decay);
  CHECK_FALSE(a.unreliable);
  const DecayFit b = fit_decay(wiggle, 0.0, 40.0);
  CHECK(std::abs(b.rate - 0.2) < 0.005);
  CHECK_FALSE(b.unreliable);
  const DecayFit c = fit_decay(flat, 0.0, 40.0);
  CHECK(c.rate == 0.0);
  CHECK(c.no_decay);

  SurvivalTrace rabi;
  for (int i = 0; i <= 400; ++i) {
    rabi.t.push_back(0.1 * i);
    rabi.P.push_back(0.55 + 0.45 * std::cos(0.1 * i));
  }
  CHECK(fit_decay(rabi, 0.0, 40.0).unreliable);
  CHECK_THROWS(fit_decay(exact, 50.0, 60.0));
  SurvivalTrace dead = exact;
  dead.P[10] = 0.0;
  CHECK_THROWS(fit_decay(dead, 0.0, 40.0));
}

TEST_CASE("dressed state is the null vector of the dressed block") {
  const ModelParams p = preset(2, 0.2);
  const double omega = 0.8;
  const PoleSet set = solve_poles(omega, p, Sector::p);
  for (const Pole& pole : set.poles) {
    if (pole.kind != PoleKind::resonance) continue;
    const auto [l, u] = dressed_state(pole, omega, p, Sector::p);
    CHECK(std::norm(l) + std::norm(u) == doctest::Approx(1.0));
    const EffectiveTwoLevel e = effective_two_level(p, omega, Sector::p);
    const cplx s = xi_at_u(pole.u, Sector::p, p.x_D) / (2.0 * p.W);
    const cplx r0 = (pole.z - e.H_ll - s * e.lambda_l * e.lambda_l) * l - (e.H_lu + s * e.lambda_l * e.lambda_u) * u;
    const cplx r1 = -(e.H_lu + s * e.lambda_l * e.lambda_u) * l + (pole.z - e.H_uu - s * e.lambda_u * e.lambda_u) * u;
    CHECK(std::abs(r0) < 1e-12);
    CHECK(std::abs(r1) < 1e-12);
  }
}

TEST_CASE("time-domain decay matches twice the pole width") {
  const DecayComparison c = compare_decay(0.8, preset(2, 0.2), Sector::p, 2000);
  REQUIRE(c.pole);
  CHECK(c.passed);
  CHECK(c.ratio == doctest::Approx(1.0).epsilon(0.1));
  CHECK(c.t_lo >= 1.0);
  CHECK(c.t_hi <= 2000 / 8.0);
}

TEST_CASE("trapped state at the dynamic BIC does not decay") {
  const ModelParams p = preset(2, 0.2);
  const auto d = dynamic_bic(p);
  REQUIRE(d.prediction);
  const PoleSet set = solve_poles(d.prediction->omega, p, Sector::p);
  const Pole* bic = nullptr;
  for (const Pole& pole : set.poles) {
    if (pole.kind == PoleKind::bic) bic = &pole;
  }
  REQUIRE(bic);
  const auto [l, u] = dressed_state(*bic, d.prediction->omega, p, Sector::p);
  const int M = 1000;
  const LatticeSystem sys = build_lattice(p, d.prediction->omega, Sector::p, M);
  const Spectrum spec = diagonalize(sys);
  std::vector<double> t;
  for (double x = 10.0 / p.W; x <= M / (4.0 * p.W); x += 1.0) t.push_back(x);
  const SurvivalTrace tr = survival_probability(sys, spec, l, u, t);
  double lowest = 1.0;
  for (double v : tr.P) lowest = std::min(lowest, v);
  CHECK(lowest > 0.9);
}
