#include "bicwire/model.hpp"

#include <cmath>

namespace bicwire {

std::string to_string(Sector s) { return s == Sector::s ? "s" : "p"; }

Sector parse_sector(std::string_view text) {
  if (text == "p") return Sector::p;
  if (text == "s") return Sector::s;
  throw ParameterError("sector", "sector must be 'p' or 's', got '" + std::string(text) + "'");
}

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw ParameterError(field, std::string(field) + " must be finite");
}

int require_integer(double v, const char* field, int lower, const char* bound_text) {
  require_finite(v, field);
  if (v != std::floor(v) || v < lower || v > 1e6) {
    throw ParameterError(field, std::string(field) + " must be a " + bound_text + " integer");
  }
  return static_cast<int>(v);
}

}  // namespace

ModelParams validate(const RawParams& raw) {
  require_finite(raw.W, "W");
  require_finite(raw.g, "g");
  require_finite(raw.T1, "T1");
  require_finite(raw.T2, "T2");
  require_finite(raw.E_l, "E_l");
  require_finite(raw.E_u, "E_u");
  if (!(raw.W > 0.0)) throw ParameterError("W", "W must be positive");

  ModelParams p;
  p.W = raw.W;
  p.g = raw.g;
  p.T1 = raw.T1;
  p.T2 = raw.T2;
  p.E_l = raw.E_l;
  p.E_u = raw.E_u;
  p.x_D = require_integer(raw.x_D, "x_D", 1, "positive");
  p.n = require_integer(raw.n, "n", 0, "non-negative");
  return p;
}

RawParams to_raw(const ModelParams& p) {
  return RawParams{p.W, p.g, p.T1, p.T2, p.E_l, p.E_u, static_cast<double>(p.x_D),
                   static_cast<double>(p.n)};
}

double band_energy(double k, double W) noexcept { return -W * std::cos(k); }

EffectiveTwoLevel effective_two_level(const ModelParams& p, double omega, Sector sector) noexcept {
  const double np1 = p.n + 1.0;
  EffectiveTwoLevel eff;
  eff.H_ll = p.E_l + np1 * omega;
  eff.H_uu = p.E_u + p.n * omega;
  eff.H_lu = std::sqrt(np1) * p.T1;
  eff.lambda_u = std::sqrt(2.0) * p.g * p.W;
  eff.lambda_l = std::sqrt(2.0 * np1) * p.T2;
  eff.sector = sector;
  return eff;
}

}  // namespace bicwire
