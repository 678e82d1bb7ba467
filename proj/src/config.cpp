#include "bicwire/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bicwire {

bool RunConfig::operator==(const RunConfig& o) const {
  auto raw_eq = [](const RawParams& a, const RawParams& b) {
    return a.W == b.W && a.g == b.g && a.T1 == b.T1 && a.T2 == b.T2 && a.E_l == b.E_l &&
           a.E_u == b.E_u && a.x_D == b.x_D && a.n == b.n;
  };
  return raw_eq(params, o.params) && sector == o.sector && omega_min == o.omega_min &&
         omega_max == o.omega_max && omega_steps == o.omega_steps && M_list == o.M_list &&
         omega_plus_el == o.omega_plus_el && workers == o.workers && output == o.output &&
         format == o.format && zgrid == o.zgrid;
}

std::string format_double(double x) {
  char buf[40];
  if (x == 0.0) x = 0.0;  // no "-0"
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

RunConfig preset_config(std::string_view name) {
  RunConfig cfg;
  double g = 0.0;
  int x_D = 0;
  if (name == "fig2") {
    x_D = 2, g = 0.2;
  } else if (name == "fig3") {
    x_D = 2, g = 0.4;
  } else if (name == "fig4") {
    x_D = 4, g = 0.2;
  } else if (name == "fig5") {
    x_D = 4, g = 0.4;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (fig2, fig3, fig4, fig5)");
  }
  cfg.params = RawParams{};
  cfg.params.W = 2.0;
  cfg.params.g = g;
  cfg.params.T1 = 0.2;
  cfg.params.T2 = 0.2;
  cfg.params.E_l = 0.0;
  cfg.params.E_u = 0.1;
  cfg.params.x_D = x_D;
  cfg.params.n = 0;
  cfg.sector = Sector::p;
  cfg.omega_min = x_D == 2 ? -1.0 : -1.6;
  cfg.omega_max = 1.6;
  cfg.omega_steps = 801;
  return cfg;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": not a number: '" + std::string(v) + "'");
  }
  return x;
}

long to_long(const std::string& key, std::string_view v) {
  long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": not an integer: '" + std::string(v) + "'");
  }
  return x;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<int> to_int_list(const std::string& key, std::string_view v) {
  std::vector<int> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    const long x = to_long(key, item);
    if (x <= 0 || x > 1'000'000) throw ConfigError(key + ": sizes must be in 1..1000000");
    out.push_back(static_cast<int>(x));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

}  // namespace

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

void apply_values(RunConfig& cfg, const ConfigMap& values) {
  for (const auto& [key, v] : values) {
    if (key == "preset") continue;
    if (key == "W") cfg.params.W = to_double(key, v);
    else if (key == "g") cfg.params.g = to_double(key, v);
    else if (key == "T1") cfg.params.T1 = to_double(key, v);
    else if (key == "T2") cfg.params.T2 = to_double(key, v);
    else if (key == "El") cfg.params.E_l = to_double(key, v);
    else if (key == "Eu") cfg.params.E_u = to_double(key, v);
    else if (key == "xD") cfg.params.x_D = to_double(key, v);
    else if (key == "n") cfg.params.n = to_double(key, v);
    else if (key == "sector") {
      try {
        cfg.sector = parse_sector(v);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("sector: ") + e.what());
      }
    }
    else if (key == "omega-min") cfg.omega_min = to_double(key, v);
    else if (key == "omega-max") cfg.omega_max = to_double(key, v);
    else if (key == "omega-steps") cfg.omega_steps = static_cast<int>(to_long(key, v));
    else if (key == "M") cfg.M_list = to_int_list(key, v);
    else if (key == "omega-plus-el") {
      if (v.empty()) cfg.omega_plus_el.reset();
      else cfg.omega_plus_el = to_double(key, v);
    }
    else if (key == "workers") {
      const long w = to_long(key, v);
      if (w < 0) throw ConfigError("workers: must be >= 0");
      cfg.workers = static_cast<unsigned>(w);
    }
    else if (key == "output") cfg.output = v;
    else if (key == "format") cfg.format = v;
    else if (key == "re-min") cfg.zgrid.re_min = to_double(key, v);
    else if (key == "re-max") cfg.zgrid.re_max = to_double(key, v);
    else if (key == "re-steps") cfg.zgrid.re_steps = static_cast<int>(to_long(key, v));
    else if (key == "im-min") cfg.zgrid.im_min = to_double(key, v);
    else if (key == "im-max") cfg.zgrid.im_max = to_double(key, v);
    else if (key == "im-steps") cfg.zgrid.im_steps = static_cast<int>(to_long(key, v));
    else if (key == "check-quadrature") cfg.zgrid.check_quadrature = to_bool(key, v);
    else throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_config(std::string_view text) {
  const ConfigMap values = parse_config_text(text);
  RunConfig cfg;
  if (auto it = values.find("preset"); it != values.end()) cfg = preset_config(it->second);
  apply_values(cfg, values);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream os;
  auto put = [&](const char* key, const std::string& v) { os << key << " = " << v << '\n'; };
  put("W", format_double(cfg.params.W));
  put("g", format_double(cfg.params.g));
  put("T1", format_double(cfg.params.T1));
  put("T2", format_double(cfg.params.T2));
  put("El", format_double(cfg.params.E_l));
  put("Eu", format_double(cfg.params.E_u));
  put("xD", format_double(cfg.params.x_D));
  put("n", format_double(cfg.params.n));
  put("sector", to_string(cfg.sector));
  put("omega-min", format_double(cfg.omega_min));
  put("omega-max", format_double(cfg.omega_max));
  put("omega-steps", std::to_string(cfg.omega_steps));
  std::string m;
  for (std::size_t i = 0; i < cfg.M_list.size(); ++i) {
    if (i) m += ',';
    m += std::to_string(cfg.M_list[i]);
  }
  put("M", m);
  if (cfg.omega_plus_el) put("omega-plus-el", format_double(*cfg.omega_plus_el));
  put("workers", std::to_string(cfg.workers));
  put("output", cfg.output);
  put("format", cfg.format);
  put("re-min", format_double(cfg.zgrid.re_min));
  put("re-max", format_double(cfg.zgrid.re_max));
  put("re-steps", std::to_string(cfg.zgrid.re_steps));
  put("im-min", format_double(cfg.zgrid.im_min));
  put("im-max", format_double(cfg.zgrid.im_max));
  put("im-steps", std::to_string(cfg.zgrid.im_steps));
  put("check-quadrature", cfg.zgrid.check_quadrature ? "true" : "false");
  return os.str();
}

ModelParams model_params(const RunConfig& cfg) { return validate(cfg.params); }

std::vector<double> omega_grid(const RunConfig& cfg) {
  if (!std::isfinite(cfg.omega_min) || !std::isfinite(cfg.omega_max) ||
      !(cfg.omega_min < cfg.omega_max)) {
    throw ConfigError("omega range: need finite omega-min < omega-max");
  }
  if (cfg.omega_steps < 2) throw ConfigError("omega-steps: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(cfg.omega_steps));
  const double span = cfg.omega_max - cfg.omega_min;
  for (int i = 0; i < cfg.omega_steps; ++i) {
    grid[i] = cfg.omega_min + span * i / (cfg.omega_steps - 1) - cfg.params.E_l;
  }
  return grid;
}

}  // namespace bicwire
