#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "bicwire/polynomial.hpp"

using namespace bicwire;
using cplx = std::complex<double>;

TEST_CASE("arithmetic and evaluation") {
  const RealPolynomial a{1.0, 2.0};       // 1 + 2x
  const RealPolynomial b{-1.0, 0.0, 1.0}; // x^2 - 1
  const RealPolynomial prod = a * b;
  CHECK(prod.degree() == 3);
  CHECK(prod[0] == -1.0);
  CHECK(prod[1] == -2.0);
  CHECK(prod[2] == 1.0);
  CHECK(prod[3] == 2.0);
  CHECK((a + b).degree() == 2);
  CHECK((b - b).trim().degree() == -1);
  CHECK((3.0 * a)[1] == 6.0);
  CHECK(RealPolynomial::monomial(4, 2.5)[4] == 2.5);
  cplx v, dv;
  prod.evaluate(cplx(0.5, 1.0), v, dv);
  CHECK(std::abs(v - a(cplx(0.5, 1.0)) * b(cplx(0.5, 1.0))) < 1e-14);
  // d/dx (2x^3 + x^2 - 2x - 1) = 6x^2 + 2x - 2
  const cplx x(0.5, 1.0);
  CHECK(std::abs(dv - (6.0 * x * x + 2.0 * x - 2.0)) < 1e-14);
}

TEST_CASE("roots of a polynomial built from known roots") {
  const std::vector<cplx> roots{{0.3, 0.8}, {0.3, -0.8}, {-1.7, 0.0}, {2.2, 0.0}, {0.0, 1.5}, {0.0, -1.5}};
  RealPolynomial p{1.0};
  p = RealPolynomial{-2.2, 1.0} * RealPolynomial{1.7, 1.0} * RealPolynomial{0.73, -0.6, 1.0} *
      RealPolynomial{2.25, 0.0, 1.0};
  const auto found = polynomial_roots(p);
  REQUIRE(found.size() == roots.size());
  for (const cplx& r : roots) {
    double best = 1e9;
    for (const cplx& f : found) best = std::min(best, std::abs(f - r));
    CHECK(best < 1e-13);
  }
}

TEST_CASE("Newton polish improves a perturbed root") {
  const RealPolynomial p{-2.0, 0.0, 1.0};
  cplx x(1.4, 0.01);
  newton_polish(p, x);
  CHECK(std::abs(x - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("random real polynomials: residuals are small") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(13);
    for (double& x : c) x = n(rng);
    const RealPolynomial p(c);
    const auto roots = polynomial_roots(p);
    CHECK(roots.size() == 12);
    for (const cplx& r : roots) {
      double scale = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) scale += std::abs(c[i]) * std::pow(std::abs(r), i);
      CHECK(std::abs(p(r)) < 1e-13 * scale);
    }
  }
}
