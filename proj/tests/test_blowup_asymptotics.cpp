#include "doctest.h"
#include "liouville/blowup_asymptotics.hpp"
#include "oracles.hpp"

using namespace liouville;

TEST_CASE("zero gradient gives zero displacement") {
  const DisplacementPrediction p = predict_displacements(build(4), 0.1, 0.0);
  for (cplx m : p.closed_form) CHECK(m == cplx(0.0));
  for (cplx m : p.linear_solve) CHECK(std::abs(m) < 1e-15);
}

TEST_CASE("closed form solves the circulant system") {
  for (int N : {1, 2, 3, 7, 20}) {
    const cplx L(0.3, -0.4);
    const double delta = 0.05;
    const DisplacementPrediction p = predict_displacements(build(N), delta, L);
    const std::vector<cplx> ref = oracle::displacement_solve(N, delta, L);
    CAPTURE(N);
    CHECK(p.max_diff < 1e-14);
    CHECK(p.summed_residual < 1e-14);
    CHECK(p.closed_form[0] == cplx(0.0));
    for (int l = 1; l <= N; ++l) {
      CHECK(std::abs(p.linear_solve[l] - ref[l]) < 1e-14);
      CHECK(std::abs(p.opposite[l] + ref[l]) < 1e-14);
      const cplx cf = delta * std::conj(L) * (oracle::e(l, N) - 1.0) / (2.0 * N);
      CHECK(std::abs(p.closed_form[l] - cf) < 1e-15);
    }
  }
}

TEST_CASE("the written-out N = 1 system has the opposite sign") {
  const DisplacementPrediction p = predict_displacements(build(1), 0.1, 1.0);
  CHECK(p.closed_form[1].real() == doctest::Approx(-0.1));
  CHECK(n1_system_displacement(0.1, 1.0).real() == doctest::Approx(0.1));
  CHECK(n1_system_displacement(0.1, cplx(0.0, 1.0)) == cplx(0.0, -0.1));
}

TEST_CASE("Pohozaev adjudication picks the closed-form convention") {
  for (int N : {1, 2}) {
    const SignAdjudication a = adjudicate_sign(N, 0.05, cplx(0.2, 0.1));
    CAPTURE(N);
    CHECK(a.adjudicated == "closed_form");
    CHECK(a.residual_closed < 0.05 * a.residual_opposite);
    CHECK(a.residual_closed < 0.01 * a.scale);
  }
}

TEST_CASE("boundary value laws") {
  const double law = boundary_value_law(1, 10.0, 0.1, 1.0);
  CHECK(law == doctest::Approx(-10.0 + std::log(8.0) + 4 * std::log(2.0) - 8 * std::log(10.0)));
  CHECK(boundary_value_law_exact(1, 10.0, 0.1, 1.0) - law == doctest::Approx(std::log(8.0)));
  // The exact law is the scaled family value on |y| = tau/delta at lambda = mu, xi = 1.
  // What is left is the ripple 4 Re(delta^{N+1}/x^{N+1}) plus O(e^{-mu}).
  for (int N : {0, 1, 2}) {
    const double mu = 14.0, delta = 0.01, tau = 1.0;
    double worst = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double v = eval_global({N, mu, 1.0, 1.0}, std::polar(tau / delta, 2 * pi * k / 16));
      worst = std::max(worst, std::abs(v - boundary_value_law_exact(N, mu, delta, tau)));
    }
    CAPTURE(N);
    CHECK(worst < 4.5 * std::pow(delta, N + 1));
    CHECK(std::abs(boundary_value_law(N, mu, delta, tau) - boundary_value_law_exact(N, mu, delta, tau)) > 2.0);
  }
}

TEST_CASE("vanishing rates") {
  const VanishingBounds b = vanishing_rates(0.1, 20.0);
  CHECK(b.first_order == doctest::Approx(0.1 + 20 * std::exp(-20.0) / 0.1));
  CHECK(b.second_order == doctest::Approx(0.1 + 20 * std::exp(-20.0) / 0.01));
  CHECK(b.second_order >= b.first_order);
}

TEST_CASE("refined maximum of the family") {
  const GlobalFamilyField U(GlobalSolutionParams{2, 16.0, 1.0, 1.0});
  int it = 0;
  const double width = std::exp(-8.0);
  const cplx q = refine_maximum(U, cplx(1.0 + 0.3 * width, -0.2 * width), width, &it);
  CHECK(std::abs(q - 1.0) < 1e-8);
  CHECK(it > 0);
}

TEST_CASE("fit of a family member to itself") {
  const GlobalSolutionParams p{1, 14.0, cplx(0.9, 0.1), 1.0};
  const GlobalFamilyField U(p);
  std::vector<cplx> samples;
  for (double r : {0.2, 0.6, 1.0, 1.5})
    for (int k = 0; k < 24; ++k) samples.push_back(std::polar(r, 2 * pi * k / 24));
  // The peak guess sqrt(xi) must sit within a bubble width of the true peak.
  const GlobalSolutionParams guess{1, 13.9, p.xi + cplx(2e-4, -1e-4), 1.0};
  const GlobalFit f = compare_to_global(U, samples, guess);
  CHECK(f.params.lambda == doctest::Approx(14.0).epsilon(1e-8));
  CHECK(std::abs(f.params.xi - p.xi) < 1e-7);
  CHECK(f.sup_difference < 1e-6);
}

TEST_CASE("three-point match recovers an exact family member") {
  for (int N : {1, 2}) {
    const GlobalSolutionParams p{N, 20.0, cplx(1.0, 0.2), 1.0};
    const GlobalFamilyField U(p);
    const double eps = std::exp(-p.lambda / (2.0 * (N + 1)));
    const auto probes = three_point_probes(10.0, 0.1, default_probe_angles(N));
    std::vector<cplx> samples;
    for (int k = 0; k < 32; ++k) samples.push_back(std::polar(3.0, 2 * pi * k / 32));
    const ThreePointMatch m =
        three_point_match(U, probes, {N, p.lambda + 0.05, p.xi + cplx(0.01, 0.01), 1.0}, samples);
    CAPTURE(N);
    CHECK(std::abs(m.params.lambda - p.lambda) < 1e-8);
    CHECK(std::abs(m.params.xi - p.xi) < 1e-8);
    CHECK(m.eps == doctest::Approx(eps));
    CHECK(m.max_scaled_residual < 1e-6);
    CHECK(m.det != 0.0);
  }
}

TEST_CASE("log field") {
  LogField f;
  f.add(cplx(1.0, 0.0), -4.0);
  f.add(cplx(0.0, 1.0), 2.0);
  const cplx y(0.3, -0.2);
  CHECK(f.value(y) == doctest::Approx(-4 * std::log(std::abs(y - 1.0)) + 2 * std::log(std::abs(y - cplx(0, 1)))));
  auto v = [&](cplx q) { return f.value(q); };
  CHECK(std::abs(f.gradient(y) - oracle::fd_gradient(v, y, 1e-6)) < 1e-8);
  CHECK(std::abs(oracle::fd_laplacian(v, y, 1e-3)) < 1e-5);
}
