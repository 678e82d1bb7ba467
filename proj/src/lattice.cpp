#include "bicwire/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "bicwire/selfenergy.hpp"
#include "bicwire/simd/kernels.hpp"

namespace bicwire {

double LatticeSystem::t_l(std::size_t j) const {
  return block.lambda_l * phi[j] / std::sqrt(static_cast<double>(M));
}

double LatticeSystem::t_u(std::size_t j) const {
  return block.lambda_u * phi[j] / std::sqrt(static_cast<double>(M));
}

Eigen::MatrixXd LatticeSystem::dense() const {
  const Eigen::Index n = M + 2;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  h(0, 0) = block.H_ll;
  h(1, 1) = block.H_uu;
  h(0, 1) = h(1, 0) = block.H_lu;
  for (int j = 0; j < M; ++j) {
    h(j + 2, j + 2) = eps[j];
    h(0, j + 2) = h(j + 2, 0) = t_l(j);
    h(1, j + 2) = h(j + 2, 1) = t_u(j);
  }
  return h;
}

LatticeSystem build_lattice(const ModelParams& p, double omega, Sector sector, int M) {
  if (M < 100) throw std::invalid_argument("lattice needs M >= 100");
  LatticeSystem sys;
  sys.params = p;
  sys.omega = omega;
  sys.sector = sector;
  sys.M = M;
  sys.block = effective_two_level(p, omega, sector);
  sys.k.resize(M);
  sys.eps.resize(M);
  sys.phi.resize(M);
  for (int j = 0; j < M; ++j) {
    const double k = std::numbers::pi * (j + 0.5) / M;
    sys.k[j] = k;
    sys.eps[j] = band_energy(k, p.W);
    sys.phi[j] = sector == Sector::p ? std::sin(k * p.x_D) : std::cos(k * p.x_D);
  }
  return sys;
}

cplx induced_self_energy(const LatticeSystem& sys, cplx z) {
  std::vector<double> w(sys.M);
  for (int j = 0; j < sys.M; ++j) w[j] = sys.t_u(j) * sys.t_u(j);
  return simd::active_kernels().resolvent_sum(w.data(), sys.eps.data(), w.size(), z);
}

// ---------------------------------------------------------------------------
// Arrowhead eigensolver

double Spectrum::discrete_weight(std::size_t i) const {
  return amp_l_[i] * amp_l_[i] + amp_u_[i] * amp_u_[i];
}

std::size_t Spectrum::nearest(double z) const {
  if (values_.empty()) throw std::logic_error("empty spectrum");
  auto it = std::lower_bound(values_.begin(), values_.end(), z);
  if (it == values_.end()) return values_.size() - 1;
  const std::size_t i = static_cast<std::size_t>(it - values_.begin());
  if (i > 0 && z - values_[i - 1] <= *it - z) return i - 1;
  return i;
}

Eigen::VectorXd Spectrum::vector(std::size_t i) const {
  const Eigen::Index M = static_cast<Eigen::Index>(d_modes_.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(M + 2);
  v(0) = amp_l_[i];
  v(1) = amp_u_[i];
  const Source& s = source_[i];
  switch (s.kind) {
    case Source::secular:
      for (Eigen::Index j = 0; j < M; ++j) {
        if (z_modes_[j] == 0.0) continue;
        v(j + 2) = z_modes_[j] / (s.tau - (d_modes_[j] - s.shift)) / s.norm;
      }
      break;
    case Source::deflated_mode:
      v(static_cast<Eigen::Index>(s.index) + 2) = 1.0;
      break;
    case Source::merged: {
      const double r = std::hypot(z_b_, z_modes_[s.index]);
      v(static_cast<Eigen::Index>(s.index) + 2) = -z_b_ / r;
      break;
    }
    case Source::deflated_b:
    case Source::block:
      break;
  }
  return v;
}

namespace {

struct Pair {
  double value;
  double amp_l;
  double amp_u;
};

// Root of f(shift + tau) = shift - alpha + tau - sum w / (tau - (d - shift)) in (lo, hi).
// f is increasing on the bracket; Newton steps that leave it fall back to bisection.
double secular_root(const simd::KernelTable& kt, const std::vector<double>& w,
                    const std::vector<double>& d, double alpha, double shift, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double offset = shift - alpha;
  double tau = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const simd::SecularSums s = kt.secular_sums(w.data(), d.data(), w.size(), shift, tau);
    const double f = offset + tau - s.s1;
    if (f == 0.0) return tau;
    if (f > 0.0) hi = tau; else lo = tau;
    if (hi - lo <= 4.0 * eps * std::max(std::abs(lo), std::abs(hi))) return 0.5 * (lo + hi);
    double next = tau - f / (1.0 + s.s2);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - tau) <= 2.0 * eps * std::abs(tau)) return next;
    tau = next;
  }
  return tau;
}

}  // namespace

Spectrum diagonalize(const LatticeSystem& sys) {
  const auto& kt = simd::active_kernels();
  const EffectiveTwoLevel& e = sys.block;
  const std::size_t M = static_cast<std::size_t>(sys.M);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(M));

  Spectrum out;
  out.d_modes_ = sys.eps;
  out.z_modes_.assign(M, 0.0);

  const double c_norm = std::hypot(e.lambda_l, e.lambda_u);
  double phi_max = 0.0;
  for (double f : sys.phi) phi_max = std::max(phi_max, std::abs(f));
  const double scale = std::abs(e.H_ll) + std::abs(e.H_uu) + std::abs(e.H_lu) + sys.params.W +
                       c_norm * phi_max * inv_sqrt_m;
  const double tol = 16.0 * std::numeric_limits<double>::epsilon() * scale;

  std::vector<std::pair<Pair, Spectrum::Source>> pairs;
  pairs.reserve(M + 2);

  if (c_norm * phi_max * inv_sqrt_m <= tol) {
    // Wire decoupled: the 2x2 block plus bare modes.
    Eigen::Matrix2d h;
    h << e.H_ll, e.H_lu, e.H_lu, e.H_uu;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
    for (int c = 0; c < 2; ++c) {
      Spectrum::Source src;
      src.kind = Spectrum::Source::block;
      src.index = static_cast<std::size_t>(c);
      pairs.push_back({{es.eigenvalues()(c), es.eigenvectors()(0, c), es.eigenvectors()(1, c)}, src});
    }
    for (std::size_t j = 0; j < M; ++j) {
      Spectrum::Source src;
      src.kind = Spectrum::Source::deflated_mode;
      src.index = j;
      pairs.push_back({{sys.eps[j], 0.0, 0.0}, src});
    }
  } else {
    const double al = e.lambda_l / c_norm;
    const double au = e.lambda_u / c_norm;
    // b = (-au, al)
    const double alpha = al * al * e.H_ll + 2.0 * al * au * e.H_lu + au * au * e.H_uu;
    const double d_b = au * au * e.H_ll - 2.0 * al * au * e.H_lu + al * al * e.H_uu;
    const double z_b = al * au * (e.H_uu - e.H_ll) + (al * al - au * au) * e.H_lu;
    out.a_l_ = al;
    out.a_u_ = au;
    out.z_b_ = z_b;
    out.d_b_ = d_b;

    std::vector<double> w;  // active poles, ascending d
    std::vector<double> d;
    w.reserve(M + 1);
    d.reserve(M + 1);
    double z_sq = 0.0;

    const bool b_active = std::abs(z_b) > tol;
    bool b_placed = !b_active;
    std::size_t merged_with = M;
    auto place_b = [&] {
      w.push_back(z_b * z_b);
      d.push_back(out.d_b_);
      z_sq += z_b * z_b;
      b_placed = true;
    };
    for (std::size_t j = 0; j < M; ++j) {
      const double zj = c_norm * sys.phi[j] * inv_sqrt_m;
      if (std::abs(zj) <= tol) {
        Spectrum::Source src;
        src.kind = Spectrum::Source::deflated_mode;
        src.index = j;
        pairs.push_back({{sys.eps[j], 0.0, 0.0}, src});
        continue;
      }
      out.z_modes_[j] = zj;
      if (!b_placed && std::abs(out.d_b_ - sys.eps[j]) <= tol) {
        // b and mode j coincide: one combination decouples exactly at eps_j.
        out.d_b_ = sys.eps[j];
        merged_with = j;
      }
      if (!b_placed && out.d_b_ <= sys.eps[j]) place_b();
      w.push_back(zj * zj);
      d.push_back(sys.eps[j]);
      z_sq += zj * zj;
    }
    if (!b_placed) place_b();

    if (!b_active) {
      Spectrum::Source src;
      src.kind = Spectrum::Source::deflated_b;
      pairs.push_back({{d_b, -au, al}, src});
    } else if (merged_with < M) {
      const double zj = out.z_modes_[merged_with];
      const double r = std::hypot(z_b, zj);
      Spectrum::Source src;
      src.kind = Spectrum::Source::merged;
      src.index = merged_with;
      pairs.push_back({{out.d_b_, -au * zj / r, al * zj / r}, src});
    }

    // Distinct pole positions; a merged pair counts once.
    std::vector<double> poles;
    poles.reserve(d.size());
    for (double x : d) {
      if (poles.empty() || x != poles.back()) poles.push_back(x);
    }
    const std::size_t np = poles.size();
    const double z_norm = std::sqrt(z_sq);

    auto finish = [&](double shift, double tau) {
      const simd::SecularSums s = kt.secular_sums(w.data(), d.data(), w.size(), shift, tau);
      const double norm = std::sqrt(1.0 + s.s2);
      const double vb = b_active ? z_b / (tau - (out.d_b_ - shift)) : 0.0;
      Spectrum::Source src;
      src.kind = Spectrum::Source::secular;
      src.shift = shift;
      src.tau = tau;
      src.norm = norm;
      pairs.push_back({{shift + tau, (al - au * vb) / norm, (au + al * vb) / norm}, src});
    };

    for (std::size_t i = 0; i <= np; ++i) {
      if (i == 0) {
        const double lo = std::min(poles.front(), alpha) - z_norm - 1.0;
        finish(poles.front(), secular_root(kt, w, d, alpha, poles.front(), lo - poles.front(), 0.0));
      } else if (i == np) {
        const double hi = std::max(poles.back(), alpha) + z_norm + 1.0;
        finish(poles.back(), secular_root(kt, w, d, alpha, poles.back(), 0.0, hi - poles.back()));
      } else {
        const double left = poles[i - 1];
        const double right = poles[i];
        const double half = 0.5 * (right - left);
        const simd::SecularSums s = kt.secular_sums(w.data(), d.data(), w.size(), left, half);
        if (left - alpha + half - s.s1 >= 0.0) {
          finish(left, secular_root(kt, w, d, alpha, left, 0.0, half));
        } else {
          finish(right, secular_root(kt, w, d, alpha, right, (left + half) - right, 0.0));
        }
      }
    }
  }

  std::sort(pairs.begin(), pairs.end(),
            [](const auto& x, const auto& y) { return x.first.value < y.first.value; });
  out.values_.reserve(pairs.size());
  out.amp_l_.reserve(pairs.size());
  out.amp_u_.reserve(pairs.size());
  out.source_.reserve(pairs.size());
  for (const auto& [pr, src] : pairs) {
    out.values_.push_back(pr.value);
    out.amp_l_.push_back(pr.amp_l);
    out.amp_u_.push_back(pr.amp_u);
    out.source_.push_back(src);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle checks

ScanReport bound_state_scan(double z0, double omega, const ModelParams& p, Sector sector,
                            std::span<const int> M_list) {
  if (M_list.size() < 3) throw std::invalid_argument("bound_state_scan needs at least 3 sizes");
  if (!std::is_sorted(M_list.begin(), M_list.end()) ||
      std::adjacent_find(M_list.begin(), M_list.end()) != M_list.end()) {
    throw std::invalid_argument("bound_state_scan sizes must be strictly increasing");
  }
  ScanReport rep;
  rep.z0 = z0;
  rep.omega = omega;
  for (int M : M_list) {
    const LatticeSystem sys = build_lattice(p, omega, sector, M);
    const Spectrum spec = diagonalize(sys);
    const std::size_t i = spec.nearest(z0);
    ScanPoint pt;
    pt.M = M;
    pt.eigenvalue = spec.values()[i];
    pt.gap = std::abs(pt.eigenvalue - z0);
    pt.weight = spec.discrete_weight(i);
    pt.candidate = pt.gap <= p.W / M;
    rep.points.push_back(pt);
  }
  bool all_candidates = true;
  for (const ScanPoint& pt : rep.points) all_candidates = all_candidates && pt.candidate;
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const ScanPoint& a = rep.points[i - 1];
    const ScanPoint& b = rep.points[i];
    const double doublings = std::log2(static_cast<double>(b.M) / a.M);
    rep.ratios.push_back(a.weight > 0.0 ? std::pow(b.weight / a.weight, 1.0 / doublings) : 0.0);
  }
  const bool converged = std::all_of(rep.ratios.begin(), rep.ratios.end(),
                                     [](double r) { return r >= 0.8 && r <= 1.25; });
  rep.confirmed = all_candidates && converged;
  if (!all_candidates) {
    rep.message = "no candidate";
  } else if (converged) {
    rep.message = "discrete weight converges";
  } else {
    rep.message = "discrete weight does not converge";
  }
  return rep;
}

ScanReport bound_state_scan(const BicPrediction& pred, const ModelParams& p,
                            std::span<const int> M_list) {
  if (!pred.in_band) throw std::invalid_argument("prediction is outside the band");
  return bound_state_scan(pred.z0, pred.omega, p, pred.sector, M_list);
}

SurvivalTrace survival_probability(const LatticeSystem& sys, const Spectrum& spec, cplx psi_l,
                                   cplx psi_u, std::span<const double> t_grid) {
  const double t_limit = sys.M / (4.0 * sys.params.W);
  for (double t : t_grid) {
    if (!(t <= t_limit)) throw std::invalid_argument("t exceeds the recurrence limit M/(4W)");
  }
  const double n = std::sqrt(std::norm(psi_l) + std::norm(psi_u));
  if (!(n > 0.0)) throw std::invalid_argument("initial state is zero");
  psi_l /= n;
  psi_u /= n;

  std::vector<double> w(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    w[i] = std::norm(spec.amp_l(i) * psi_l + spec.amp_u(i) * psi_u);
  }
  const auto& kt = simd::active_kernels();
  SurvivalTrace tr;
  tr.t.assign(t_grid.begin(), t_grid.end());
  tr.P.reserve(t_grid.size());
  for (double t : t_grid) {
    tr.P.push_back(std::min(1.0, std::norm(kt.spectral_sum(w.data(), spec.values().data(), w.size(), t))));
  }
  return tr;
}

DecayFit fit_decay(const SurvivalTrace& trace, double t_lo, double t_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] < t_lo || trace.t[i] > t_hi) continue;
    if (!(trace.P[i] > 1e-12)) throw std::invalid_argument("P <= 1e-12 inside the fit window");
    xs.push_back(trace.t[i]);
    ys.push_back(std::log(trace.P[i]));
  }
  if (xs.size() < 3) throw std::invalid_argument("fit window holds fewer than 3 samples");

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ssr += r * r;
  }
  DecayFit fit;
  fit.points = xs.size();
  fit.rate = -slope;
  fit.rms = std::sqrt(ssr / n);
  fit.stderr_rate = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.no_decay = std::abs(fit.rate) <= std::max(1e-10, 2.0 * fit.stderr_rate);
  fit.unreliable = fit.rms > 0.05;
  return fit;
}

std::pair<cplx, cplx> dressed_state(const Pole& pole, double omega, const ModelParams& p,
                                    Sector sector) {
  const EffectiveTwoLevel e = effective_two_level(p, omega, sector);
  const cplx s = xi_at_u(pole.u, sector, p.x_D) / (2.0 * p.W);
  const cplx m00 = pole.z - e.H_ll - s * e.lambda_l * e.lambda_l;
  const cplx m01 = -e.H_lu - s * e.lambda_l * e.lambda_u;
  const cplx m11 = pole.z - e.H_uu - s * e.lambda_u * e.lambda_u;
  // Null vector from the row with more weight.
  cplx a = m00, b = m01;
  if (std::norm(m01) + std::norm(m11) > std::norm(m00) + std::norm(m01)) {
    a = m01;
    b = m11;
  }
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (n == 0.0) return {1.0, 0.0};
  return {b / n, -a / n};
}

DecayComparison compare_decay(double omega, const ModelParams& p, Sector sector, int M) {
  DecayComparison cmp;
  cmp.omega = omega;
  const PoleSet set = solve_poles(omega, p, sector);
  for (const Pole& pole : set.poles) {
    if (pole.kind != PoleKind::resonance || std::abs(pole.z.real()) >= p.W) continue;
    if (!cmp.pole || pole.gamma < cmp.pole->gamma) cmp.pole = pole;
  }
  if (!cmp.pole) {
    cmp.message = "no in-band resonance";
    return cmp;
  }
  const double gamma = cmp.pole->gamma;
  cmp.t_hi = std::min(M / (4.0 * p.W), 12.0 / (2.0 * gamma));
  cmp.t_lo = std::max(2.0 / p.W, std::min(20.0, 0.1 * cmp.t_hi));

  const LatticeSystem sys = build_lattice(p, omega, sector, M);
  const Spectrum spec = diagonalize(sys);
  const auto [psi_l, psi_u] = dressed_state(*cmp.pole, omega, p, sector);
  constexpr int kSamples = 400;
  std::vector<double> t(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) t[i] = cmp.t_lo + (cmp.t_hi - cmp.t_lo) * i / kSamples;
  t.back() = cmp.t_hi;
  const SurvivalTrace tr = survival_probability(sys, spec, psi_l, psi_u, t);
  cmp.fit = fit_decay(tr, cmp.t_lo, cmp.t_hi);
  cmp.ratio = cmp.fit.rate / (2.0 * gamma);
  cmp.passed = !cmp.fit.unreliable && cmp.ratio >= 0.9 && cmp.ratio <= 1.1;
  cmp.message = cmp.passed ? "ok" : "decay rate does not match 2 Gamma";
  return cmp;
}

}  // namespace bicwire
