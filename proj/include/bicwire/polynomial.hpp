#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <vector>

namespace bicwire {

/// Dense real polynomial, coefficients in ascending powers.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  RealPolynomial(std::initializer_list<double> coeffs) : c_(coeffs) {}

  static RealPolynomial monomial(int power, double coeff = 1.0);

  /// Degree after dropping exactly-zero leading coefficients; -1 for the zero polynomial.
  int degree() const noexcept;
  std::span<const double> coefficients() const noexcept { return c_; }
  double operator[](std::size_t i) const noexcept { return i < c_.size() ? c_[i] : 0.0; }

  std::complex<double> operator()(std::complex<double> x) const noexcept;
  /// Value and first derivative by Horner's rule.
  void evaluate(std::complex<double> x, std::complex<double>& value,
                std::complex<double>& derivative) const noexcept;

  RealPolynomial& trim();

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);
  friend RealPolynomial operator*(double s, const RealPolynomial& a);

 private:
  std::vector<double> c_;
};

/// All complex roots: eigenvalues of the companion matrix, each refined by
/// Newton iteration on the polynomial itself.
std::vector<std::complex<double>> polynomial_roots(const RealPolynomial& p);

/// Newton refinement of one root; stops on a step below 4 ulp of |x| or when
/// the residual stops decreasing. Returns the iteration count used.
int newton_polish(const RealPolynomial& p, std::complex<double>& x, int max_iterations = 50);

}  // namespace bicwire
