#pragma once

// Independent reference implementations used by the tests. Each one is
// written from the defining formula, without sharing code with the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// log( e^lambda / (1 + e^lambda h0 |y^{N+1} - xi|^2 / (8(N+1)^2))^2 )
inline double family(int N, double lambda, cplx xi, double h0, cplx y) {
  const double a = std::exp(lambda) * h0 / (8.0 * (N + 1) * (N + 1));
  return lambda - 2.0 * std::log(1.0 + a * std::norm(std::pow(y, N + 1) - xi));
}

inline cplx fd_gradient(const std::function<double(cplx)>& f, cplx y, double h) {
  return {(f(y + h) - f(y - h)) / (2 * h), (f(y + cplx(0, h)) - f(y - cplx(0, h))) / (2 * h)};
}

inline double fd_laplacian(const std::function<double(cplx)>& f, cplx y, double h) {
  return (f(y + h) + f(y - h) + f(y + cplx(0, h)) + f(y - cplx(0, h)) - 4 * f(y)) / (h * h);
}

inline double d(int N, int j) {
  const double s = std::sin(j * pi / (N + 1));
  return 1.0 / (s * s);
}

inline cplx e(int l, int N) { return std::polar(1.0, 2 * pi * l / (N + 1)); }

inline Eigen::MatrixXd circulant_A(int N) {
  double D = 0;
  for (int j = 1; j <= N; ++j) D += d(N, j);
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = i == j ? D : -d(N, std::abs(i - j));
  return A;
}

// Solves A m = conj(L) delta (e^{i beta_1}, ..., e^{i beta_N}) with a complex LU.
inline std::vector<cplx> displacement_solve(int N, double delta, cplx L) {
  const Eigen::MatrixXcd A = circulant_A(N).cast<cplx>();
  Eigen::VectorXcd rhs(N);
  for (int l = 1; l <= N; ++l) rhs[l - 1] = std::conj(L) * delta * e(l, N);
  const Eigen::VectorXcd m = A.fullPivLu().solve(rhs);
  std::vector<cplx> out(N + 1, 0.0);
  for (int l = 1; l <= N; ++l) out[l] = m[l - 1];
  return out;
}

// Dirichlet Green's function of -Delta on B_R: (1/2pi) log(|R^2 - conj(y) eta| / (R |y - eta|)).
inline double green(double R, cplx y, cplx eta) {
  return std::log(std::abs(R * R - std::conj(y) * eta) / (R * std::abs(y - eta))) / (2 * pi);
}

// Poisson integral of g on |x| = R, trapezoid with n nodes.
inline double poisson(const std::function<double(double)>& g, double R, cplx p, int n = 4096) {
  double s = 0;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * pi * k / n;
    s += (R * R - std::norm(p)) / std::norm(std::polar(R, t) - p) * g(t);
  }
  return s / n;
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace oracle
