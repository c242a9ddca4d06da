#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "liouville/types.hpp"

namespace liouville {

// Real bivariate polynomial sum c_{ij} x^i y^j.
class Polynomial2 {
 public:
  Polynomial2() = default;
  static Polynomial2 constant(double c);
  static Polynomial2 x();
  static Polynomial2 y();
  // Re( sum_m c_m z^m ) with z = x + i y.
  static Polynomial2 real_part(const std::vector<cplx>& coeffs);

  double value(double x, double y) const;
  Eigen::Vector2d gradient(double x, double y) const;
  Eigen::Matrix2d hessian(double x, double y) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;
  std::string to_string() const;

  Polynomial2 operator+(const Polynomial2& o) const;
  Polynomial2 operator-(const Polynomial2& o) const;
  Polynomial2 operator*(const Polynomial2& o) const;
  Polynomial2 operator*(double s) const;
  Polynomial2 pow(int n) const;
  bool operator==(const Polynomial2& o) const { return terms_ == o.terms_; }

  const std::map<std::pair<int, int>, double>& terms() const { return terms_; }

 private:
  void add_term(int i, int j, double c);
  std::map<std::pair<int, int>, double> terms_;
};

// Coefficient h(x) = P(x) exp(Q(x)), the closed-form grammar used by problem files.
class Coefficient {
 public:
  Coefficient() : prefactor_(Polynomial2::constant(1.0)) {}
  Coefficient(Polynomial2 prefactor, Polynomial2 exponent)
      : prefactor_(std::move(prefactor)), exponent_(std::move(exponent)) {}

  static Coefficient one() { return Coefficient(); }
  // Parses e.g. "1 + 0.1*x", "exp(0.1*x - 0.2*x*y)", "(1+x^2)*exp(y)".
  static Coefficient parse(const std::string& text);

  double value(cplx p) const;
  cplx gradient(cplx p) const;  // d/dx + i d/dy
  Eigen::Matrix2d hessian(cplx p) const;
  cplx log_gradient(cplx p) const;
  double log_laplacian(cplx p) const;

  Coefficient operator*(const Coefficient& o) const;
  const Polynomial2& prefactor() const { return prefactor_; }
  const Polynomial2& exponent() const { return exponent_; }
  std::string to_string() const;

 private:
  Polynomial2 prefactor_;
  Polynomial2 exponent_;
};

// K(x) = |x|^{2N} h(x): the full weight multiplying e^u.
class Weight {
 public:
  Weight(int N, Coefficient h) : N_(N), h_(std::move(h)) {}
  int N() const { return N_; }
  const Coefficient& h() const { return h_; }
  double value(cplx p) const;
  cplx gradient(cplx p) const;

 private:
  int N_;
  Coefficient h_;
};

// exp(4 Re sum_{k=1}^{K} (conj(xi) x^{N+1} / tau^{2N+2})^k / k): the harmonic
// factor that makes the global family with center xi constant on |x| = tau.
Coefficient family_compensation(int N, cplx xi, double tau, int terms);

}  // namespace liouville
