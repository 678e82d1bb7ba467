#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "bicwire/commands.hpp"
#include "bicwire/config.hpp"

using namespace bicwire;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::string_view cmd, const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = cli::run_command(cmd, cfg, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("defaults equal the fig2 preset") {
  const RunConfig d;
  const RunConfig f2 = preset_config("fig2");
  CHECK(d == f2);
  CHECK(model_params(d) == ModelParams{});
}

TEST_CASE("presets") {
  const RunConfig f3 = preset_config("fig3");
  CHECK(f3.params.g == 0.4);
  CHECK(f3.params.x_D == 2);
  CHECK(f3.omega_min == -1.0);
  const RunConfig f5 = preset_config("fig5");
  CHECK(f5.params.g == 0.4);
  CHECK(f5.params.x_D == 4);
  CHECK(f5.omega_min == -1.6);
  CHECK(f5.omega_max == 1.6);
  CHECK(f5.omega_steps == 801);
  CHECK_THROWS_AS(preset_config("fig9"), ConfigError);
  CHECK(preset_names().size() == 4);
}

TEST_CASE("config round trip is lossless") {
  RunConfig c = preset_config("fig4");
  c.params.g = 0.1 + 0.2;
  c.params.E_l = -1.0 / 3.0;
  c.params.T2 = 1e-300;
  c.sector = Sector::s;
  c.omega_plus_el = std::nextafter(0.8, 1.0);
  c.M_list = {300, 600, 1200, 2400};
  c.workers = 3;
  c.output = "out dir/sweep.csv";
  c.format = "json";
  c.zgrid.check_quadrature = true;
  c.zgrid.im_min = -2.5;
  const std::string text = serialize(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize(parse_config(text)) == text);
  CHECK(parse_config(serialize(RunConfig{})) == RunConfig{});
}

TEST_CASE("config parse errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("g = abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("g = 0.1\ng = 0.2"), ConfigError);
  CHECK_THROWS_AS(parse_config("g 0.1"), ConfigError);
  CHECK_THROWS_AS(parse_config("sector = q"), ConfigError);
  CHECK_THROWS_AS(parse_config("M = 100,,200"), ConfigError);
  CHECK_THROWS_AS(parse_config("check-quadrature = maybe"), ConfigError);
}

TEST_CASE("precedence: defaults < preset < file") {
  const RunConfig c = parse_config("# comment\npreset = fig5\n  g = 0.3   # override\n");
  CHECK(c.params.x_D == 4);
  CHECK(c.params.g == 0.3);
  CHECK(c.omega_min == -1.6);
  RunConfig d = preset_config("fig2");
  apply_values(d, {{"T2", "0"}});
  CHECK(d.params.T2 == 0.0);
  CHECK(d.params.g == 0.2);
}

TEST_CASE("omega grid is in Omega, range is in Omega + E_l") {
  RunConfig c;
  c.params.E_l = 0.25;
  c.omega_steps = 5;
  const auto g = omega_grid(c);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(-1.25));
  CHECK(g.back() == doctest::Approx(1.35));
  c.omega_steps = 1;
  CHECK_THROWS_AS(omega_grid(c), ConfigError);
  c.omega_steps = 5;
  c.omega_max = c.omega_min;
  CHECK_THROWS_AS(omega_grid(c), ConfigError);
}

TEST_CASE("sweep output: header, determinism, worker independence") {
  RunConfig c = preset_config("fig2");
  c.omega_steps = 81;
  c.workers = 1;
  const Run a = run("sweep", c);
  REQUIRE(a.code == 0);
  CHECK(a.out.rfind("omega_plus_el,branch_id,re_z,im_z,gamma,u_re,u_im,residual\n", 0) == 0);
  CHECK(a.out.find('\r') == std::string::npos);
  c.workers = 3;
  const Run b = run("sweep", c);
  CHECK(a.out == b.out);
  CHECK(run("sweep", c).out == b.out);
  c.format = "json";
  const Run j = run("sweep", c);
  CHECK(json::parse(j.out).size() > 81);
}

TEST_CASE("config errors exit 2") {
  RunConfig c;
  c.params.W = -1.0;
  Run r = run("sweep", c);
  CHECK(r.code == 2);
  CHECK(r.err.find("W must be positive") != std::string::npos);
  c = RunConfig{};
  c.params.x_D = 1.5;
  CHECK(run("bic", c).code == 2);
  c = RunConfig{};
  c.format = "xml";
  CHECK(run("sweep", c).code == 2);
  c.format = "csv";
  CHECK(run("verify", c).code == 2);
  c = RunConfig{};
  c.M_list = {500, 1000};
  CHECK(run("verify", c).code == 2);
  c.M_list = {50, 100, 200};
  CHECK(run("verify", c).code == 2);
  CHECK(run("plot", RunConfig{}).code == 2);
}

TEST_CASE("bic predictions") {
  Run r = run("bic", preset_config("fig2"));
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["kind"] == "static");
  CHECK(j[0]["m"] == 2);
  CHECK(j[0]["z0"].get<double>() == 0.0);
  CHECK(j[0]["omega_plus_el"].get<double>() == doctest::Approx(0.4));
  CHECK(j[1]["kind"] == "dynamic");
  CHECK(j[1]["z0"].get<double>() == doctest::Approx(-0.3));
  CHECK(j[1]["omega_plus_el"].get<double>() == doctest::Approx(-0.2));

  j = json::parse(run("bic", preset_config("fig3")).out);
  CHECK(j[1]["omega_plus_el"].get<double>() == doctest::Approx(-0.65).epsilon(1e-12));

  RunConfig no_t2 = preset_config("fig2");
  no_t2.params.T2 = 0.0;
  r = run("bic", no_t2);
  j = json::parse(r.out);
  CHECK(j.size() == 1);
  CHECK(j[0]["kind"] == "static");
  CHECK(r.err.find("no dynamic BIC") != std::string::npos);

  j = json::parse(run("bic", preset_config("fig4")).out);
  CHECK(j.size() == 4);
  CHECK(j[0]["m"] == 2);
  CHECK(j[0]["omega_plus_el"].get<double>() == doctest::Approx(-1.38779720936).epsilon(1e-10));
}

TEST_CASE("verify passes on fig2 and reports the decay check") {
  RunConfig c = preset_config("fig2");
  c.M_list = {250, 500, 1000};
  c.omega_plus_el = 0.8;
  const Run r = run("verify", c);
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["passed"] == true);
  int scans = 0, decays = 0;
  for (const auto& chk : j["checks"]) {
    scans += chk["check"] == "lattice_scan";
    decays += chk["check"] == "decay_rate";
  }
  CHECK(scans == 2);
  CHECK(decays == 1);
}

TEST_CASE("verify skips out-of-band predictions") {
  RunConfig c = preset_config("fig2");
  c.params.T2 = 0.02;
  c.M_list = {200, 400, 800};
  const Run r = run("verify", c);
  CHECK(r.code == 0);
  bool skipped = false;
  const json j = json::parse(r.out);
  for (const auto& chk : j["checks"]) {
    if (chk.value("skipped", false)) {
      skipped = true;
      CHECK(chk["reason"] == "bound state outside band, not a BIC");
    }
  }
  CHECK(skipped);
}

TEST_CASE("verify exits 4 on a failed check") {
  RunConfig c = preset_config("fig2");
  c.M_list = {200, 400, 800};
  c.params.E_u = 5.0;
  c.omega_plus_el = 6.0;  // both levels far above the band: nothing in-band decays
  const Run r = run("verify", c);
  CHECK(r.code == 4);
  CHECK(r.err.find("verification failed") != std::string::npos);
}

TEST_CASE("selfenergy table") {
  RunConfig c;
  c.zgrid = ZGrid{0.0, 0.0, 1, 0.0, 0.0, 1, false};
  Run r = run("selfenergy", c);
  REQUIRE(r.code == 0);
  CHECK(r.out == "re_z,im_z,sector,sheet,re_xi,im_xi,status\n0,0,p,first,0,0,ok\n0,0,p,second,0,0,ok\n");
  c.sector = Sector::s;
  r = run("selfenergy", c);
  CHECK(r.out.find("0,0,s,first,0,-2,ok") != std::string::npos);

  c.zgrid = ZGrid{2.0, 2.0, 1, 0.0, 0.0, 1, false};
  r = run("selfenergy", c);
  CHECK(r.code == 0);
  CHECK(r.out.find("band_edge") != std::string::npos);

  c.zgrid = ZGrid{-1.0, 1.0, 3, 0.5, 0.5, 1, true};
  r = run("selfenergy", c);
  CHECK(r.out.find(",false") == std::string::npos);
  CHECK(r.out.find(",true") != std::string::npos);
  c.format = "json";
  const json j = json::parse(run("selfenergy", c).out);
  CHECK(j.size() == 6);
  CHECK(j[0]["quadrature_agrees"] == true);
}
