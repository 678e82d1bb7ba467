#include "bicwire/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bicwire {

RealPolynomial RealPolynomial::monomial(int power, double coeff) {
  std::vector<double> c(static_cast<std::size_t>(power) + 1, 0.0);
  c.back() = coeff;
  return RealPolynomial(std::move(c));
}

int RealPolynomial::degree() const noexcept {
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) {
    if (c_[static_cast<std::size_t>(i)] != 0.0) return i;
  }
  return -1;
}

RealPolynomial& RealPolynomial::trim() {
  c_.resize(static_cast<std::size_t>(degree() + 1));
  return *this;
}

std::complex<double> RealPolynomial::operator()(std::complex<double> x) const noexcept {
  std::complex<double> v = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * x + *it;
  return v;
}

void RealPolynomial::evaluate(std::complex<double> x, std::complex<double>& value,
                              std::complex<double>& derivative) const noexcept {
  value = 0.0;
  derivative = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    derivative = derivative * x + value;
    value = value * x + *it;
  }
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return RealPolynomial(std::move(c));
}

RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
  return a + (-1.0) * b;
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return RealPolynomial(std::move(c));
}

RealPolynomial operator*(double s, const RealPolynomial& a) {
  std::vector<double> c(a.c_);
  for (double& v : c) v *= s;
  return RealPolynomial(std::move(c));
}

int newton_polish(const RealPolynomial& p, std::complex<double>& x, int max_iterations) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::complex<double> f, df;
  p.evaluate(x, f, df);
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (f == 0.0 || df == 0.0) break;
    const std::complex<double> step = f / df;
    const std::complex<double> next = x - step;
    std::complex<double> f_next, df_next;
    p.evaluate(next, f_next, df_next);
    if (std::abs(f_next) >= std::abs(f)) break;
    x = next;
    f = f_next;
    df = df_next;
    if (std::abs(step) <= 4.0 * eps * std::abs(x)) break;
  }
  return it;
}

std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& p) {
  const int n = p.degree();
  if (n < 1) return {};
  const double lead = p[static_cast<std::size_t>(n)];

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[static_cast<std::size_t>(i)] / lead;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> roots(ev.data(), ev.data() + ev.size());
  for (auto& r : roots) newton_polish(p, r);
  return roots;
}

}  // namespace bicwire
