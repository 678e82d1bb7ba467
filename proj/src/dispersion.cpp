#include "bicwire/dispersion.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace bicwire {

const char* to_string(PoleKind k) noexcept {
  switch (k) {
    case PoleKind::resonance: return "resonance";
    case PoleKind::antiresonance: return "antiresonance";
    case PoleKind::bound: return "bound";
    case PoleKind::virtual_state: return "virtual";
    case PoleKind::bic: return "bic";
    case PoleKind::band_artifact: return "band_artifact";
  }
  return "unknown";
}

double residual_tolerance(cplx z) noexcept { return 1e-9 * std::max(1.0, std::norm(z)); }

cplx dispersion_at_u(cplx u, double omega, const ModelParams& p, Sector sector) {
  const cplx z = z_from_u(u, p.W);
  const auto eff = effective_two_level(p, omega, sector);
  return two_level_determinant(z, eff) - xi_at_u(u, sector, p.x_D) * fano_coefficient(z, p, omega);
}

cplx dispersion_value(cplx z, double omega, const ModelParams& p, Sector sector, Sheet sheet) {
  return dispersion_at_u(u_from_z(z, sheet, p.W).u, omega, p, sector);
}

cplx dispersion_det_form(cplx z, double omega, const ModelParams& p, Sector sector, Sheet sheet) {
  const auto eff = effective_two_level(p, omega, sector);
  const cplx s = xi(z, sector, sheet, p.x_D, p.W) / (2.0 * p.W);
  const cplx a = z - eff.H_ll - s * eff.lambda_l * eff.lambda_l;
  const cplx d = z - eff.H_uu - s * eff.lambda_u * eff.lambda_u;
  const cplx b = -eff.H_lu - s * eff.lambda_l * eff.lambda_u;
  return a * d - b * b;
}

RealPolynomial build_poly(double omega, const ModelParams& p, Sector sector) {
  const auto eff = effective_two_level(p, omega, sector);
  const double np1 = p.n + 1.0;
  const double W = p.W;

  // z*u and u*Q(z) as polynomials in u.
  const RealPolynomial u{0.0, 1.0};
  const RealPolynomial zu{-0.5 * W, 0.0, -0.5 * W};
  const double q_slope = p.g * p.g * W + np1 * p.T2 * p.T2 / W;
  const double q_const = -p.g * p.g * W * eff.H_ll + 2.0 * np1 * p.g * p.T1 * p.T2 -
                         np1 * (p.T2 * p.T2 / W) * eff.H_uu;
  const RealPolynomial uq = q_slope * zu + q_const * u;
  const RealPolynomial u2p =
      (zu - eff.H_ll * u) * (zu - eff.H_uu * u) - (eff.H_lu * eff.H_lu) * (u * u);

  const RealPolynomial shape =
      RealPolynomial{1.0} + sector_sign(sector) * RealPolynomial::monomial(2 * p.x_D);
  RealPolynomial pi = (u * u - RealPolynomial{1.0}) * u2p - 2.0 * (u * u) * shape * uq;
  return pi.trim();
}

namespace {

constexpr double kSpuriousTol = 1e-8;
constexpr double kRealTol = 1e-9;

Pole classify(cplx u, double omega, const ModelParams& p, Sector sector) {
  Pole pole;
  pole.u = u;
  pole.z = z_from_u(u, p.W);
  pole.gamma = std::abs(pole.z.imag());
  pole.residual = std::abs(dispersion_at_u(u, omega, p, sector));
  const double modulus = std::abs(u);
  if (pole.gamma < kRealTol && std::abs(pole.z.real()) <= p.W + kRealTol &&
      std::abs(modulus - 1.0) < 1e-6) {
    pole.kind = PoleKind::bic;
    pole.sheet = Sheet::first;
  } else if (modulus < 1.0) {
    pole.kind = PoleKind::bound;
    pole.sheet = Sheet::first;
  } else {
    pole.sheet = Sheet::second;
    if (pole.gamma <= kRealTol * std::max(1.0, std::abs(pole.z))) {
      pole.kind = PoleKind::virtual_state;
    } else {
      pole.kind = pole.z.imag() < 0.0 ? PoleKind::resonance : PoleKind::antiresonance;
    }
  }
  return pole;
}

bool pole_order(const Pole& a, const Pole& b) {
  if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
  if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
  return a.u.imag() < b.u.imag();
}

}  // namespace

PoleSet solve_poles(double omega, const ModelParams& p, Sector sector) {
  PoleSet set;
  set.omega = omega;
  const RealPolynomial pi = build_poly(omega, p, sector);
  for (const cplx& u : polynomial_roots(pi)) {
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) {
      throw SolverError(omega, "root finder returned a non-finite root");
    }
    if (std::abs(u) < kSpuriousTol) {
      Pole rej;
      rej.u = u;
      rej.kind = PoleKind::band_artifact;
      rej.residual = std::numeric_limits<double>::infinity();
      set.rejected.push_back(rej);
      continue;
    }
    Pole pole = classify(u, omega, p, sector);
    const double tol = residual_tolerance(pole.z);
    const bool at_edge = std::abs(u * u - 1.0) < kSpuriousTol;
    if (at_edge && !(pole.residual <= tol)) {
      pole.kind = PoleKind::band_artifact;
      set.rejected.push_back(pole);
      continue;
    }
    if (!(pole.residual <= tol)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "pole at z = " << pole.z << " (u = " << pole.u << ") misses the residual bound: |D| = "
          << pole.residual << " > " << tol;
      throw SolverError(omega, msg.str());
    }
    set.tracked.push_back(pole);
  }
  std::sort(set.tracked.begin(), set.tracked.end(), pole_order);

  // A BIC is a real z reached from both u and conj(u); report it once (Im u >= 0 copy).
  std::vector<bool> drop(set.tracked.size(), false);
  for (std::size_t i = 0; i < set.tracked.size(); ++i) {
    if (drop[i] || set.tracked[i].kind != PoleKind::bic) continue;
    for (std::size_t j = i + 1; j < set.tracked.size(); ++j) {
      if (drop[j] || set.tracked[j].kind != PoleKind::bic) continue;
      if (std::abs(set.tracked[i].z - set.tracked[j].z) < 1e-8) {
        drop[set.tracked[i].u.imag() >= set.tracked[j].u.imag() ? j : i] = true;
      }
    }
  }
  for (std::size_t i = 0; i < set.tracked.size(); ++i) {
    if (!drop[i]) set.poles.push_back(set.tracked[i]);
  }
  return set;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct Match {
  std::vector<int> next_of;  // index in b for each a, -1 if unmatched
  double max_distance = 0.0;
};

Match greedy_match(const std::vector<Pole>& a, const std::vector<Pole>& b) {
  struct Pair {
    double d;
    int i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      pairs.push_back({std::abs(a[i].u - b[j].u), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  Match m;
  m.next_of.assign(a.size(), -1);
  std::vector<bool> used(b.size(), false);
  for (const Pair& pr : pairs) {
    if (m.next_of[static_cast<std::size_t>(pr.i)] >= 0 || used[static_cast<std::size_t>(pr.j)]) continue;
    m.next_of[static_cast<std::size_t>(pr.i)] = pr.j;
    used[static_cast<std::size_t>(pr.j)] = true;
    m.max_distance = std::max(m.max_distance, pr.d);
  }
  return m;
}

std::vector<PoleSet> solve_grid(std::span<const double> grid, const ModelParams& p, Sector sector,
                                unsigned workers) {
  std::vector<PoleSet> out(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, grid.size())));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        out[i] = solve_poles(grid[i], p, sector);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

SweepTable sweep(std::span<const double> omega_grid, const ModelParams& p, Sector sector,
                 const SweepOptions& options) {
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    if (!(omega_grid[i] > omega_grid[i - 1])) {
      throw std::invalid_argument("sweep: omega grid must be strictly increasing");
    }
  }
  std::vector<PoleSet> sets = solve_grid(omega_grid, p, sector, options.workers);

  // Midpoint refinement where continuation jumps.
  if (sets.size() > 2 && options.max_refine_depth > 0) {
    std::vector<double> step_dist;
    for (std::size_t i = 1; i < sets.size(); ++i) {
      step_dist.push_back(greedy_match(sets[i - 1].tracked, sets[i].tracked).max_distance);
    }
    std::vector<double> sorted = step_dist;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double limit = options.jump_factor * sorted[sorted.size() / 2];

    if (limit > 0.0) {
      std::vector<PoleSet> refined;
      refined.push_back(std::move(sets[0]));
      for (std::size_t i = 1; i < sets.size(); ++i) {
        // Depth-first bisection of step (i-1, i).
        std::vector<PoleSet> segment{refined.back(), std::move(sets[i])};
        for (int depth = 0; depth < options.max_refine_depth; ++depth) {
          std::vector<PoleSet> next_segment{segment.front()};
          bool inserted = false;
          for (std::size_t k = 1; k < segment.size(); ++k) {
            const double d = greedy_match(segment[k - 1].tracked, segment[k].tracked).max_distance;
            if (d > limit) {
              next_segment.push_back(
                  solve_poles(0.5 * (segment[k - 1].omega + segment[k].omega), p, sector));
              inserted = true;
            }
            next_segment.push_back(segment[k]);
          }
          segment = std::move(next_segment);
          if (!inserted) break;
        }
        for (std::size_t k = 1; k < segment.size(); ++k) refined.push_back(std::move(segment[k]));
      }
      sets = std::move(refined);
    }
  }

  SweepTable table;
  std::vector<int> ids;
  int next_id = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<int> cur(sets[i].tracked.size(), -1);
    if (i == 0) {
      for (auto& id : cur) id = next_id++;
    } else {
      const Match m = greedy_match(sets[i - 1].tracked, sets[i].tracked);
      for (std::size_t a = 0; a < m.next_of.size(); ++a) {
        if (m.next_of[a] >= 0) cur[static_cast<std::size_t>(m.next_of[a])] = ids[a];
      }
      for (auto& id : cur) {
        if (id < 0) id = next_id++;
      }
    }
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      const Pole& pole = sets[i].tracked[k];
      rows.push_back({sets[i].omega + p.E_l, cur[k], pole.z, pole.gamma, pole.u, pole.residual, pole.kind});
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.branch_id < b.branch_id; });
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    ids = std::move(cur);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Gamma-zero refinement

namespace {

struct Probe {
  double gamma;
  cplx z;
};

Probe nearest_gamma(double omega, cplx z_ref, const ModelParams& p, Sector sector) {
  const PoleSet set = solve_poles(omega, p, sector);
  Probe best{std::numeric_limits<double>::infinity(), z_ref};
  double best_d = std::numeric_limits<double>::infinity();
  for (const Pole& pole : set.tracked) {
    const double d = std::abs(pole.z - z_ref);
    if (d < best_d) {
      best_d = d;
      best = {pole.gamma, pole.z};
    }
  }
  return best;
}

}  // namespace

GammaZero refine_gamma_minimum(double omega_lo, double omega_hi, cplx z_ref, const ModelParams& p,
                               Sector sector) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = omega_lo;
  double b = omega_hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  Probe fc = nearest_gamma(c, z_ref, p, sector);
  Probe fd = nearest_gamma(d, z_ref, p, sector);
  while (b - a > 1e-7 * std::max(1.0, std::abs(a))) {
    if (fc.gamma <= fd.gamma) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = nearest_gamma(c, fc.z, p, sector);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = nearest_gamma(d, fd.z, p, sector);
    }
  }
  double x = fc.gamma <= fd.gamma ? c : d;
  Probe best = fc.gamma <= fd.gamma ? fc : fd;

  // Golden section stalls once Gamma reaches rounding level; a cubic fit over
  // symmetric samples locates a quadratic minimum far more precisely.
  for (double h : {2e-4, 4e-5}) {
    constexpr int kHalf = 4;
    Eigen::Matrix<double, 2 * kHalf + 1, 4> A;
    Eigen::Matrix<double, 2 * kHalf + 1, 1> y;
    for (int k = -kHalf; k <= kHalf; ++k) {
      const double t = static_cast<double>(k) / kHalf;
      const Probe pr = nearest_gamma(x + t * h, best.z, p, sector);
      A.row(k + kHalf) << 1.0, t, t * t, t * t * t;
      y(k + kHalf) = pr.gamma;
    }
    const Eigen::Vector4d coef = A.colPivHouseholderQr().solve(y);
    if (!(coef(2) > 0.0)) break;
    // Stationary point of the cubic closest to t = 0.
    double t_star = -coef(1) / (2.0 * coef(2));
    if (coef(3) != 0.0) {
      const double disc = 4.0 * coef(2) * coef(2) - 12.0 * coef(3) * coef(1);
      if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        const double t1 = (-2.0 * coef(2) + r) / (6.0 * coef(3));
        const double t2 = (-2.0 * coef(2) - r) / (6.0 * coef(3));
        t_star = std::abs(t1) < std::abs(t2) ? t1 : t2;
      }
    }
    if (!(std::abs(t_star) <= 1.0)) break;
    const double x_new = x + t_star * h;
    const Probe pr = nearest_gamma(x_new, best.z, p, sector);
    if (pr.gamma <= best.gamma + 1e-13) {
      x = x_new;
      best = pr;
    }
  }
  return GammaZero{x + p.E_l, best.z, best.gamma, -1};
}

std::vector<GammaZero> find_gamma_zeros(const SweepTable& table, const ModelParams& p, Sector sector,
                                        double gamma_tol) {
  std::map<int, std::vector<const SweepRow*>> branches;
  for (const SweepRow& row : table.rows) branches[row.branch_id].push_back(&row);

  auto eligible = [&](const SweepRow& r) {
    return std::abs(r.z.real()) < p.W &&
           (r.kind == PoleKind::resonance || r.kind == PoleKind::antiresonance || r.kind == PoleKind::bic);
  };

  std::vector<GammaZero> zeros;
  for (const auto& [id, rows] : branches) {
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const SweepRow& r = *rows[i];
      if (!eligible(r)) continue;
      if (r.gamma > rows[i - 1]->gamma || r.gamma > rows[i + 1]->gamma) continue;
      // Skip interior points of a flat run; the first point of the run stands for it.
      if (r.gamma == rows[i - 1]->gamma && eligible(*rows[i - 1])) continue;
      GammaZero zero = refine_gamma_minimum(rows[i - 1]->omega_plus_el - p.E_l,
                                            rows[i + 1]->omega_plus_el - p.E_l, r.z, p, sector);
      if (zero.gamma < gamma_tol && std::abs(zero.z.real()) < p.W) {
        zero.branch_id = id;
        zeros.push_back(zero);
      }
    }
  }
  std::sort(zeros.begin(), zeros.end(),
            [](const GammaZero& a, const GammaZero& b) { return a.omega_plus_el < b.omega_plus_el; });
  std::vector<GammaZero> unique;
  for (const GammaZero& z : zeros) {
    if (!unique.empty() && std::abs(z.omega_plus_el - unique.back().omega_plus_el) < 1e-6) {
      if (z.gamma < unique.back().gamma) unique.back() = z;
      continue;
    }
    unique.push_back(z);
  }
  return unique;
}

double min_in_band_gamma(const SweepTable& table, double W, double lo, double hi) {
  double best = std::numeric_limits<double>::infinity();
  for (const SweepRow& r : table.rows) {
    if (r.omega_plus_el < lo || r.omega_plus_el > hi) continue;
    if (std::abs(r.z.real()) >= W) continue;
    if (r.kind == PoleKind::bound || r.kind == PoleKind::virtual_state) continue;
    best = std::min(best, r.gamma);
  }
  return best;
}

}  // namespace bicwire
