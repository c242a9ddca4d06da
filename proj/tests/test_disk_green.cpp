#include "doctest.h"
#include "liouville/disk_green.hpp"
#include "liouville/global_family.hpp"
#include "oracles.hpp"

using namespace liouville;

TEST_CASE("green function vanishes on the boundary and is symmetric") {
  const DiskGreen g(1.5);
  for (cplx eta : {cplx(0.1, 0.2), cplx(-0.7, 0.9), cplx(1.2, -0.3)}) {
    for (int k = 0; k < 12; ++k) CHECK(std::abs(green(g, std::polar(1.5, 0.5 * k), eta)) < 1e-14);
    for (cplx y : {cplx(0.4, -0.1), cplx(-1.0, -0.5)}) {
      CHECK(green(g, y, eta) == doctest::Approx(green(g, eta, y)).epsilon(1e-13));
      CHECK(green(g, y, eta) == doctest::Approx(oracle::green(1.5, y, eta)).epsilon(1e-13));
      CHECK(green(g, y, eta) > 0.0);
    }
  }
  CHECK_THROWS_AS(DiskGreen(0.0), Error);
}

TEST_CASE("regular part") {
  const DiskGreen g(2.0);
  const cplx y(0.3, -0.8), eta(-0.5, 0.6);
  CHECK(green(g, y, eta) ==
        doctest::Approx(-std::log(std::abs(y - eta)) / (2 * pi) + green_regular(g, y, eta)));
  auto H = [&](cplx q) { return green_regular(g, q, eta); };
  CHECK(std::abs(grad1_regular(g, y, eta) - oracle::fd_gradient(H, y, 1e-6)) < 1e-8);
  // Harmonic in y.
  CHECK(std::abs(oracle::fd_laplacian(H, y, 1e-3)) < 1e-6);
}

TEST_CASE("harmonic lift reproduces harmonic data") {
  const cplx c(0.5, -0.25);
  const double R = 0.8;
  // u = Re((x - c)^3) + 2 Im(x - c) + 1 restricted to the circle.
  auto u = [&](cplx x) { return std::real(std::pow(x - c, 3)) + 2 * std::imag(x - c) + 1.0; };
  std::vector<double> s(64);
  for (int k = 0; k < 64; ++k) s[k] = u(c + std::polar(R, 2 * pi * k / 64));
  const HarmonicLift L = harmonic_lift(s, R, c);
  CHECK(L.center_value() == doctest::Approx(1.0));
  for (cplx p : {c, c + cplx(0.3, 0.2), c + cplx(-0.5, 0.5)}) {
    CHECK(L.value(p) == doctest::Approx(u(p)).epsilon(1e-12));
    CHECK(std::abs(L.gradient(p) - oracle::fd_gradient(u, p, 1e-6)) < 1e-7);
  }
  HarmonicLift shifted = L;
  shifted.shift(1.0);
  CHECK(std::abs(shifted.center_value()) < 1e-14);
  CHECK_THROWS_AS(harmonic_lift(std::vector<double>(8, 0.0), 1.0), Error);
}

TEST_CASE("harmonic lift matches the Poisson integral of non-harmonic data") {
  auto g = [](double t) { return std::exp(std::cos(t)) * std::sin(2 * t) + std::abs(std::sin(t)); };
  const int n = 1024;
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = g(2 * pi * k / n);
  const HarmonicLift L = harmonic_lift(s, 1.0);
  for (cplx p : {cplx(0.0, 0.0), cplx(0.3, 0.4), cplx(-0.6, 0.1)})
    CHECK(L.value(p) == doctest::Approx(oracle::poisson(g, 1.0, p, 8192)).epsilon(1e-5));
}

TEST_CASE("representation formula") {
  const DiskGreen g(1.0);
  // -Delta(1 - |y|^2) = 4, zero boundary value.
  CHECK(representation_check(g, [](cplx y) { return 1.0 - std::norm(y); }, [](cplx) { return 4.0; },
                             0.0, {64, 64}) < 1e-12);
  // Radial member of the family: constant on the circle.
  const GlobalSolutionParams p{0, 2.0, 0.0, 1.0};
  const double ub = eval_global(p, 1.0);
  auto u = [&](cplx y) { return eval_global(p, y); };
  auto f = [&](cplx y) { return std::exp(eval_global(p, y)); };
  const double coarse = representation_check(g, u, f, ub, {64, 64});
  const double fine = representation_check(g, u, f, ub, {128, 128});
  CHECK(fine < 1e-6);
  CHECK(fine < coarse);
  // A wrong boundary constant shows up one for one.
  CHECK(representation_check(g, [](cplx y) { return 1.0 - std::norm(y); }, [](cplx) { return 4.0; },
                             0.5, {64, 64}) == doctest::Approx(0.5));
}
