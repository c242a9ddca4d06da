#include "doctest.h"
#include "liouville/coefficient.hpp"
#include "liouville/global_family.hpp"
#include "oracles.hpp"

using namespace liouville;

TEST_CASE("parser evaluates the closed-form grammar") {
  const cplx p(0.3, -0.7);
  CHECK(Coefficient::parse("1").value(p) == doctest::Approx(1.0));
  CHECK(Coefficient::parse("1 + 0.1*x").value(p) == doctest::Approx(1.03));
  CHECK(Coefficient::parse("exp(0.1*x - 0.2*x*y)").value(p) ==
        doctest::Approx(std::exp(0.03 - 0.2 * 0.3 * -0.7)));
  CHECK(Coefficient::parse("(1+x^2)*exp(y)").value(p) == doctest::Approx((1 + 0.09) * std::exp(-0.7)));
  CHECK(Coefficient::parse("2*(x+y)^2/4").value(p) == doctest::Approx(0.5 * 0.16));
  CHECK(Coefficient::parse("-x + 3").value(p) == doctest::Approx(2.7));
  CHECK(Coefficient::parse("exp(x)^2").value(p) == doctest::Approx(std::exp(0.6)));
}

TEST_CASE("parser rejects expressions outside the grammar") {
  for (const char* bad : {"", "1 +", "sin(x)", "x / y", "exp(exp(x))", "exp(x) + 1", "(1 + x", "x^-1", "1 $ 2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Coefficient::parse(bad), Error);
  }
}

TEST_CASE("coefficient derivatives match finite differences") {
  const Coefficient h = Coefficient::parse("(1 + 0.3*x - 0.2*y^2)*exp(0.1*x*y - 0.4*y)");
  auto f = [&](cplx q) { return h.value(q); };
  auto lf = [&](cplx q) { return std::log(h.value(q)); };
  for (cplx p : {cplx(0.1, 0.2), cplx(-0.5, 0.4), cplx(0.7, -0.6)}) {
    const cplx g = h.gradient(p), fd = oracle::fd_gradient(f, p, 1e-5);
    CHECK(std::abs(g - fd) < 1e-8);
    const cplx lg = h.log_gradient(p), lfd = oracle::fd_gradient(lf, p, 1e-5);
    CHECK(std::abs(lg - lfd) < 1e-8);
    CHECK(h.log_laplacian(p) == doctest::Approx(oracle::fd_laplacian(lf, p, 1e-4)).epsilon(1e-5));
    const Eigen::Matrix2d H = h.hessian(p);
    const double e = 1e-5;
    const cplx gx = (h.gradient(p + e) - h.gradient(p - e)) / (2 * e);
    const cplx gy = (h.gradient(p + cplx(0, e)) - h.gradient(p - cplx(0, e))) / (2 * e);
    CHECK(H(0, 0) == doctest::Approx(gx.real()).epsilon(1e-6));
    CHECK(H(1, 0) == doctest::Approx(gx.imag()).epsilon(1e-6));
    CHECK(H(1, 1) == doctest::Approx(gy.imag()).epsilon(1e-6));
    CHECK(H(0, 1) == doctest::Approx(H(1, 0)));
  }
}

TEST_CASE("polynomial algebra") {
  const Polynomial2 x = Polynomial2::x(), y = Polynomial2::y();
  const Polynomial2 p = (x + y).pow(3);
  CHECK(p.degree() == 3);
  CHECK(p.value(0.5, 2.0) == doctest::Approx(std::pow(2.5, 3)));
  CHECK((p - p).is_zero());
  CHECK(Polynomial2::constant(2.0).is_constant());
  // Re(z^2) = x^2 - y^2
  const Polynomial2 r = Polynomial2::real_part({0.0, 0.0, 1.0});
  CHECK(r == x * x - y * y);
  CHECK_THROWS_AS(x.pow(-1), Error);
}

TEST_CASE("weight includes the singular factor") {
  const Weight K(2, Coefficient::parse("1 + x"));
  const cplx p(0.4, 0.3);
  CHECK(K.value(p) == doctest::Approx(std::pow(0.25, 2) * 1.4));
  auto f = [&](cplx q) { return K.value(q); };
  CHECK(std::abs(K.gradient(p) - oracle::fd_gradient(f, p, 1e-6)) < 1e-8);
}

TEST_CASE("compensation makes the shifted family constant on the circle") {
  for (int N : {0, 1, 2}) {
    const double tau = 1.0, delta = 0.2;
    const cplx xi = std::pow(delta, N + 1);
    const Coefficient h = family_compensation(N, xi, tau, 16);
    CHECK(h.value(0.0) == doctest::Approx(1.0));
    const GlobalSolutionParams p{N, 14.0, xi, 1.0};
    double lo = 1e300, hi = -1e300, raw_lo = 1e300, raw_hi = -1e300;
    for (int k = 0; k < 64; ++k) {
      const cplx x = std::polar(tau, 2 * oracle::pi * k / 64);
      const double v = eval_global(p, x) - std::log(h.value(x));
      lo = std::min(lo, v), hi = std::max(hi, v);
      raw_lo = std::min(raw_lo, eval_global(p, x)), raw_hi = std::max(raw_hi, eval_global(p, x));
    }
    CAPTURE(N);
    // What is left is the O(1/a) correction of the logarithm.
    CHECK(hi - lo < 1e-4);
    CHECK(raw_hi - raw_lo > 100 * (hi - lo));
  }
  CHECK_THROWS_AS(family_compensation(-1, 0.1, 1.0, 4), Error);
}
