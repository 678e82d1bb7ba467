// bicwire: resonance poles and BICs of the driven two-impurity wire.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicwire/commands.hpp"
#include "bicwire/config.hpp"

namespace {

struct Flag {
  std::string key;
  CLI::Option* option = nullptr;
  std::string value;
};

class FlagSet {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    auto& f = flags_.emplace_back(std::make_unique<Flag>());
    f->key = key;
    f->option = app->add_option("--" + key, f->value, help);
  }
  void add_switch(CLI::App* app, const std::string& key, const std::string& help) {
    auto& f = flags_.emplace_back(std::make_unique<Flag>());
    f->key = key;
    f->option = app->add_flag("--" + key, help);
  }
  bicwire::ConfigMap given() const {
    bicwire::ConfigMap m;
    for (const auto& f : flags_) {
      if (f->option->count() == 0) continue;
      m[f->key] = f->value.empty() && f->option->get_expected_min() == 0 ? "true" : f->value;
    }
    return m;
  }

 private:
  std::vector<std::unique_ptr<Flag>> flags_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance poles, bound states in the continuum and lattice cross-checks for a "
               "radiation-driven two-impurity quantum wire."};
  app.require_subcommand(1);
  app.footer(
      "Parameter precedence: built-in defaults (fig2 parameters, W = 2) < --preset < --config "
      "file < individual flags.\nConfig file: 'key = value' lines using the flag names without "
      "dashes; '#' comments.\nExit codes: 0 ok, 2 config error, 3 solver error, 4 verification "
      "failure.");

  std::string preset;
  std::string config_path;
  FlagSet flags;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--preset", preset, "fig2 | fig3 | fig4 | fig5");
    sub->add_option("--config", config_path, "key = value config file");
    flags.add(sub, "sector", "p | s");
    flags.add(sub, "W", "half-bandwidth");
    flags.add(sub, "g", "impurity-wire coupling");
    flags.add(sub, "T1", "upper <-> lower optical coupling");
    flags.add(sub, "T2", "lower level <-> wire optical coupling");
    flags.add(sub, "El", "lower level energy");
    flags.add(sub, "Eu", "upper level energy");
    flags.add(sub, "xD", "impurity position (sites)");
    flags.add(sub, "n", "photon manifold");
    flags.add(sub, "omega-min", "sweep start, in Omega + E_l");
    flags.add(sub, "omega-max", "sweep end, in Omega + E_l");
    flags.add(sub, "omega-steps", "sweep grid points");
    flags.add(sub, "workers", "sweep threads (0: all cores)");
    flags.add(sub, "output", "output file (default stdout)");
    flags.add(sub, "format", "csv | json");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "branch-tracked poles over an Omega grid (CSV)");
  CLI::App* bic = app.add_subcommand("bic", "closed-form static and dynamic BIC predictions (JSON)");
  CLI::App* verify = app.add_subcommand("verify", "check predictions against the pole solver and the lattice");
  CLI::App* selfenergy = app.add_subcommand("selfenergy", "tabulate the self-energy on a complex z grid");
  for (CLI::App* sub : {sweep, bic, verify, selfenergy}) add_shared(sub);
  flags.add(verify, "M", "lattice sizes, comma separated (e.g. 500,1000,2000)");
  flags.add(verify, "omega-plus-el", "also compare the lattice decay rate with 2 Gamma here");
  flags.add(selfenergy, "re-min", "grid Re z start");
  flags.add(selfenergy, "re-max", "grid Re z end");
  flags.add(selfenergy, "re-steps", "grid Re z points");
  flags.add(selfenergy, "im-min", "grid Im z start");
  flags.add(selfenergy, "im-max", "grid Im z end");
  flags.add(selfenergy, "im-steps", "grid Im z points");
  flags.add_switch(selfenergy, "check-quadrature", "compare with adaptive quadrature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bicwire::cli::ExitCode::config_error;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  bicwire::RunConfig cfg;
  try {
    bicwire::ConfigMap file_values;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw bicwire::ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      file_values = bicwire::parse_config_text(ss.str());
    }
    if (!preset.empty()) {
      cfg = bicwire::preset_config(preset);
    } else if (auto it = file_values.find("preset"); it != file_values.end()) {
      cfg = bicwire::preset_config(it->second);
    }
    bicwire::apply_values(cfg, file_values);
    bicwire::apply_values(cfg, flags.given());
  } catch (const bicwire::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return bicwire::cli::ExitCode::config_error;
  }

  std::ostringstream out;
  const int code = bicwire::cli::run_command(chosen->get_name(), cfg, out, std::cerr);

  if (cfg.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      std::cerr << "config error: cannot write '" << cfg.output << "'\n";
      return bicwire::cli::ExitCode::config_error;
    }
    file << out.str();
  }
  return code;
}
