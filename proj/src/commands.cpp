#include "bicwire/commands.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "bicwire/bic.hpp"
#include "bicwire/dispersion.hpp"
#include "bicwire/lattice.hpp"
#include "bicwire/selfenergy.hpp"

namespace bicwire::cli {

using json = nlohmann::ordered_json;

namespace {

std::string pick_format(const RunConfig& cfg, std::string_view fallback,
                        std::initializer_list<std::string_view> allowed) {
  const std::string f = cfg.format.empty() ? std::string(fallback) : cfg.format;
  for (std::string_view a : allowed) {
    if (f == a) return f;
  }
  std::string msg = "format: '" + f + "' not supported here (";
  bool first = true;
  for (std::string_view a : allowed) {
    msg += (first ? "" : ", ") + std::string(a);
    first = false;
  }
  throw ConfigError(msg + ")");
}

json params_json(const ModelParams& p, Sector sector) {
  return json{{"W", p.W},   {"g", p.g},     {"T1", p.T1},     {"T2", p.T2}, {"El", p.E_l},
              {"Eu", p.E_u}, {"xD", p.x_D}, {"n", p.n}, {"sector", to_string(sector)}};
}

json prediction_json(const BicPrediction& b, const ModelParams& p) {
  json j;
  j["kind"] = to_string(b.kind);
  j["sector"] = to_string(b.sector);
  j["m"] = b.m ? json(*b.m) : json(nullptr);
  j["z0"] = b.z0;
  j["omega"] = b.omega;
  j["omega_plus_el"] = b.omega + p.E_l;
  j["in_band"] = b.in_band;
  j["residual"] = b.residual;
  if (b.kind == BicKind::dynamic_bic) {
    j["two_level_root"] = b.two_level_root_sign > 0 ? "+" : "-";
    j["two_level_match_error"] = b.two_level_match_error;
  }
  return j;
}

}  // namespace

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ModelParams p = model_params(cfg);
  const std::string format = pick_format(cfg, "csv", {"csv", "json"});
  const std::vector<double> grid = omega_grid(cfg);
  SweepOptions opt;
  opt.workers = cfg.workers;
  const SweepTable table = sweep(grid, p, cfg.sector, opt);

  if (format == "csv") {
    out << "omega_plus_el,branch_id,re_z,im_z,gamma,u_re,u_im,residual\n";
    for (const SweepRow& r : table.rows) {
      out << format_double(r.omega_plus_el) << ',' << r.branch_id << ',' << format_double(r.z.real())
          << ',' << format_double(r.z.imag()) << ',' << format_double(r.gamma) << ','
          << format_double(r.u.real()) << ',' << format_double(r.u.imag()) << ','
          << format_double(r.residual) << '\n';
    }
  } else {
    json rows = json::array();
    for (const SweepRow& r : table.rows) {
      rows.push_back({{"omega_plus_el", r.omega_plus_el},
                      {"branch_id", r.branch_id},
                      {"re_z", r.z.real()},
                      {"im_z", r.z.imag()},
                      {"gamma", r.gamma},
                      {"u_re", r.u.real()},
                      {"u_im", r.u.imag()},
                      {"residual", r.residual},
                      {"kind", to_string(r.kind)}});
    }
    out << rows.dump(2) << '\n';
  }
  return ExitCode::ok;
}

int cmd_bic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ModelParams p = model_params(cfg);
  const std::string format = pick_format(cfg, "json", {"json", "csv"});
  const std::vector<BicPrediction> preds = predict_bics(p, cfg.sector);
  const DynamicBic dyn = dynamic_bic(p, cfg.sector);
  if (!dyn.prediction) err << dyn.reason << '\n';

  if (format == "json") {
    json arr = json::array();
    for (const BicPrediction& b : preds) arr.push_back(prediction_json(b, p));
    out << arr.dump(2) << '\n';
  } else {
    out << "kind,sector,m,z0,omega,omega_plus_el,in_band,residual\n";
    for (const BicPrediction& b : preds) {
      out << to_string(b.kind) << ',' << to_string(b.sector) << ','
          << (b.m ? std::to_string(*b.m) : std::string()) << ',' << format_double(b.z0) << ','
          << format_double(b.omega) << ',' << format_double(b.omega + p.E_l) << ','
          << (b.in_band ? "true" : "false") << ',' << format_double(b.residual) << '\n';
    }
  }
  return ExitCode::ok;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ModelParams p = model_params(cfg);
  pick_format(cfg, "json", {"json"});
  if (cfg.M_list.size() < 3) throw ConfigError("M: need at least 3 sizes");
  for (std::size_t i = 0; i < cfg.M_list.size(); ++i) {
    if (cfg.M_list[i] < 100) throw ConfigError("M: sizes must be >= 100");
    if (i > 0 && cfg.M_list[i] <= cfg.M_list[i - 1]) throw ConfigError("M: sizes must increase");
  }

  json report;
  report["params"] = params_json(p, cfg.sector);
  report["M"] = cfg.M_list;
  json checks = json::array();
  bool all_passed = true;
  auto record = [&](json check) {
    if (!check.value("skipped", false) && !check["passed"].get<bool>()) {
      all_passed = false;
      err << "verification failed: " << check.dump() << '\n';
    }
    checks.push_back(std::move(check));
  };

  for (const BicPrediction& pred : predict_bics(p, cfg.sector)) {
    const BicVerification v = verify_bic(pred, p);
    record({{"check", "residual"},
            {"prediction", prediction_json(pred, p)},
            {"passed", v.passed()},
            {"residual_first", v.residual_first},
            {"residual_second", v.residual_second},
            {"solver_checked", v.checked_solver},
            {"solver_distance", v.checked_solver ? json(v.solver_distance) : json(nullptr)},
            {"message", v.message}});

    if (!pred.in_band) {
      record({{"check", "lattice_scan"},
              {"prediction", prediction_json(pred, p)},
              {"skipped", true},
              {"reason", "bound state outside band, not a BIC"}});
      continue;
    }
    const ScanReport scan = bound_state_scan(pred, p, cfg.M_list);
    json pts = json::array();
    for (const ScanPoint& pt : scan.points) {
      pts.push_back({{"M", pt.M},
                     {"candidate", pt.candidate},
                     {"eigenvalue", pt.eigenvalue},
                     {"gap", pt.gap},
                     {"weight", pt.weight}});
    }
    record({{"check", "lattice_scan"},
            {"prediction", prediction_json(pred, p)},
            {"passed", scan.confirmed},
            {"points", pts},
            {"ratios", scan.ratios},
            {"message", scan.message}});
  }

  if (const DynamicBic dyn = dynamic_bic(p, cfg.sector); !dyn.prediction) {
    report["notes"] = json::array({dyn.reason});
  }

  if (cfg.omega_plus_el) {
    const double omega = *cfg.omega_plus_el - p.E_l;
    const int M = cfg.M_list.back();
    const DecayComparison cmp = compare_decay(omega, p, cfg.sector, M);
    json c{{"check", "decay_rate"}, {"omega_plus_el", *cfg.omega_plus_el}, {"M", M}};
    if (cmp.pole) {
      c["pole_z"] = {cmp.pole->z.real(), cmp.pole->z.imag()};
      c["two_gamma"] = 2.0 * cmp.pole->gamma;
      c["fitted_rate"] = cmp.fit.rate;
      c["fitted_rate_stderr"] = cmp.fit.stderr_rate;
      c["window"] = {cmp.t_lo, cmp.t_hi};
      c["ratio"] = cmp.ratio;
    }
    c["passed"] = cmp.passed;
    c["message"] = cmp.message;
    record(std::move(c));
  }

  report["checks"] = std::move(checks);
  report["passed"] = all_passed;
  out << report.dump(2) << '\n';
  return all_passed ? ExitCode::ok : ExitCode::verification_failed;
}

int cmd_selfenergy(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const ModelParams p = model_params(cfg);
  const std::string format = pick_format(cfg, "csv", {"csv", "json"});
  const ZGrid& zg = cfg.zgrid;
  if (zg.re_steps < 1 || zg.im_steps < 1) throw ConfigError("z grid: steps must be >= 1");
  if (!(zg.re_min <= zg.re_max) || !(zg.im_min <= zg.im_max)) {
    throw ConfigError("z grid: need min <= max");
  }
  auto axis = [](double lo, double hi, int steps, int i) {
    return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  };

  const bool quad = zg.check_quadrature;
  json rows = json::array();
  if (format == "csv") {
    out << "re_z,im_z,sector,sheet,re_xi,im_xi,status";
    if (quad) out << ",re_xi_quadrature,im_xi_quadrature,quadrature_agrees";
    out << '\n';
  }
  for (int i = 0; i < zg.re_steps; ++i) {
    for (int k = 0; k < zg.im_steps; ++k) {
      const cplx z(axis(zg.re_min, zg.re_max, zg.re_steps, i), axis(zg.im_min, zg.im_max, zg.im_steps, k));
      for (Sheet sheet : {Sheet::first, Sheet::second}) {
        cplx value(NAN, NAN);
        std::string status = "ok";
        try {
          value = xi(z, cfg.sector, sheet, p.x_D, p.W);
        } catch (const BandEdgeError&) {
          status = "band_edge";
        }
        const bool do_quad = quad && sheet == Sheet::first && status == "ok" && std::abs(z.imag()) > 1e-6;
        cplx q(NAN, NAN);
        bool agrees = false;
        if (do_quad) {
          q = xi_quadrature(z, cfg.sector, p.x_D, p.W);
          agrees = std::abs(value - q) <= 1e-8 * std::max(std::abs(q), 1e-300);
        }
        if (format == "csv") {
          out << format_double(z.real()) << ',' << format_double(z.imag()) << ','
              << to_string(cfg.sector) << ',' << to_string(sheet) << ','
              << format_double(value.real()) << ',' << format_double(value.imag()) << ',' << status;
          if (quad) {
            if (do_quad) {
              out << ',' << format_double(q.real()) << ',' << format_double(q.imag()) << ','
                  << (agrees ? "true" : "false");
            } else {
              out << ",,,";
            }
          }
          out << '\n';
        } else {
          json r{{"re_z", z.real()},
                 {"im_z", z.imag()},
                 {"sector", to_string(cfg.sector)},
                 {"sheet", to_string(sheet)},
                 {"re_xi", status == "ok" ? json(value.real()) : json(nullptr)},
                 {"im_xi", status == "ok" ? json(value.imag()) : json(nullptr)},
                 {"status", status}};
          if (do_quad) {
            r["re_xi_quadrature"] = q.real();
            r["im_xi_quadrature"] = q.imag();
            r["quadrature_agrees"] = agrees;
          }
          rows.push_back(std::move(r));
        }
      }
    }
  }
  if (format == "json") out << rows.dump(2) << '\n';
  return ExitCode::ok;
}

int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (name == "sweep") return cmd_sweep(cfg, out, err);
    if (name == "bic") return cmd_bic(cfg, out, err);
    if (name == "verify") return cmd_verify(cfg, out, err);
    if (name == "selfenergy") return cmd_selfenergy(cfg, out, err);
    err << "config error: unknown command '" << name << "'\n";
    return ExitCode::config_error;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const SolverError& e) {
    err << "solver error at omega+E_l = " << format_double(e.omega() + cfg.params.E_l) << ": "
        << e.what() << '\n';
    return ExitCode::solver_error;
  }
}

}  // namespace bicwire::cli
