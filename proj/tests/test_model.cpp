#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "bicwire/model.hpp"

using namespace bicwire;

TEST_CASE("defaults are the fig2 set at W = 2") {
  const ModelParams p;
  CHECK(p.W == 2.0);
  CHECK(p.g == 0.2);
  CHECK(p.T1 == 0.2);
  CHECK(p.T2 == 0.2);
  CHECK(p.E_u == 0.1);
  CHECK(p.x_D == 2);
  CHECK(p.n == 0);
  CHECK(validate(to_raw(p)) == p);
}

TEST_CASE("validate names the offending field") {
  auto field_of = [](RawParams r) {
    try {
      validate(r);
    } catch (const ParameterError& e) {
      return e.field();
    }
    return std::string("none");
  };
  RawParams r;
  r.W = 0.0;
  CHECK(field_of(r) == "W");
  r = {};
  r.W = -2.0;
  CHECK(field_of(r) == "W");
  r = {};
  r.x_D = 2.5;
  CHECK(field_of(r) == "x_D");
  r = {};
  r.x_D = 0;
  CHECK(field_of(r) == "x_D");
  r = {};
  r.n = -1;
  CHECK(field_of(r) == "n");
  r = {};
  r.g = std::numeric_limits<double>::quiet_NaN();
  CHECK(field_of(r) == "g");
  r = {};
  r.T2 = std::numeric_limits<double>::infinity();
  CHECK(field_of(r) == "T2");
  CHECK(field_of(RawParams{}) == "none");
}

TEST_CASE("sector parsing and sign") {
  CHECK(parse_sector("p") == Sector::p);
  CHECK(parse_sector("s") == Sector::s);
  CHECK_THROWS_AS(parse_sector("x"), ParameterError);
  CHECK(sector_sign(Sector::s) == 1.0);
  CHECK(sector_sign(Sector::p) == -1.0);
  CHECK(to_string(Sector::p) == "p");
}

TEST_CASE("band energy spans [-W, W]") {
  CHECK(band_energy(0.0, 2.0) == doctest::Approx(-2.0));
  CHECK(band_energy(M_PI, 2.0) == doctest::Approx(2.0));
  CHECK(std::abs(band_energy(M_PI / 2, 3.0)) < 1e-15);
}

TEST_CASE("effective two-level block") {
  ModelParams p;
  p.n = 2;
  p.E_l = -0.3;
  const double omega = 0.7;
  const EffectiveTwoLevel e = effective_two_level(p, omega, Sector::s);
  CHECK(e.H_ll == doctest::Approx(-0.3 + 3 * 0.7));
  CHECK(e.H_uu == doctest::Approx(0.1 + 2 * 0.7));
  CHECK(e.H_lu == doctest::Approx(std::sqrt(3.0) * 0.2));
  CHECK(e.lambda_u == doctest::Approx(std::sqrt(2.0) * 0.2 * 2.0));
  CHECK(e.lambda_l == doctest::Approx(std::sqrt(6.0) * 0.2));
  CHECK(e.sector == Sector::s);
}

TEST_CASE("Q equals the rank-one coupling form lambda^T adj(z - H) lambda / (2W)") {
  // Q(z) must equal c^T adj(z - H) c / (2W) with c = (lambda_l, lambda_u); this is
  // what makes det(z - H - Xi c c^T / 2W) = P - Xi Q.
  for (int n : {0, 1, 3}) {
    ModelParams p;
    p.n = n;
    p.g = 0.31;
    p.T1 = 0.17;
    p.T2 = 0.23;
    p.W = 1.7;
    const double omega = 0.41;
    const EffectiveTwoLevel e = effective_two_level(p, omega, Sector::p);
    for (double z : {-1.3, 0.0, 0.25, 2.9}) {
      const double adj = e.lambda_l * e.lambda_l * (z - e.H_uu) +
                         e.lambda_u * e.lambda_u * (z - e.H_ll) +
                         2.0 * e.lambda_l * e.lambda_u * e.H_lu;
      CHECK(fano_coefficient(z, p, omega) == doctest::Approx(adj / (2.0 * p.W)).epsilon(1e-13));
      CHECK(two_level_determinant(z, e) ==
            doctest::Approx((z - e.H_ll) * (z - e.H_uu) - e.H_lu * e.H_lu));
    }
  }
}
