#pragma once

// Run configuration shared by the CLI subcommands.
//
// File format: one "key = value" per line, '#' starts a comment. Keys are the
// long flag names without the leading dashes (W, g, T1, T2, El, Eu, xD, n, sector,
// omega-min, ...). Precedence: defaults < preset < file < flags.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bicwire/model.hpp"

namespace bicwire {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ZGrid {
  double re_min = -3.0;
  double re_max = 3.0;
  int re_steps = 13;
  double im_min = -1.0;
  double im_max = 1.0;
  int im_steps = 5;
  bool check_quadrature = false;

  bool operator==(const ZGrid&) const = default;
};

struct RunConfig {
  RawParams params;
  Sector sector = Sector::p;
  // Sweep range in Omega + E_l, the figures' abscissa.
  double omega_min = -1.0;
  double omega_max = 1.6;
  int omega_steps = 801;
  std::vector<int> M_list{500, 1000, 2000};
  std::optional<double> omega_plus_el;  // verify: decay check point
  unsigned workers = 0;
  std::string output;  // empty: stdout
  std::string format;  // empty: the subcommand's default
  ZGrid zgrid;

  bool operator==(const RunConfig& o) const;
};

std::vector<std::string> preset_names();

/// Defaults overlaid with a named preset (fig2 .. fig5). Throws ConfigError.
RunConfig preset_config(std::string_view name);

using ConfigMap = std::map<std::string, std::string>;

/// Splits "key = value" lines. Throws ConfigError on malformed or repeated keys.
ConfigMap parse_config_text(std::string_view text);

/// Sets every key in `values` ("preset" excluded). Throws ConfigError on an
/// unknown key or a value that does not parse.
void apply_values(RunConfig& cfg, const ConfigMap& values);

/// Defaults, then the file's preset key if any, then its other keys.
RunConfig parse_config(std::string_view text);
RunConfig load_config_file(const std::string& path);

/// Every field, doubles at 17 significant digits; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

/// Validated model parameters (throws ParameterError).
ModelParams model_params(const RunConfig& cfg);

/// Driving frequencies Omega (not shifted) of the sweep grid. Throws ConfigError.
std::vector<double> omega_grid(const RunConfig& cfg);

/// "%.17g"
std::string format_double(double x);

}  // namespace bicwire
