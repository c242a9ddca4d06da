#include "doctest.h"
#include "liouville/global_family.hpp"
#include "liouville/pohozaev_quadrature.hpp"

using namespace liouville;

namespace {
PohozaevQuadSpec spec_for(const GlobalSolutionParams& p, int nodes = 2048) {
  PohozaevQuadSpec s;
  s.boundary_nodes = nodes;
  s.bubble_centers = local_maxima(p);
  s.bubble_width = std::exp(-p.lambda / 2);
  return s;
}
}  // namespace

TEST_CASE("identity holds on a ball around one peak") {
  const GlobalSolutionParams p{2, 12.0, 1.0, 1.0};
  const GlobalFamilyField U(p);
  const Weight K(2, Coefficient::one());
  for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
    const PohozaevReport r = pohozaev(U, K, root_of_unity(1, 3), 0.3, dir, spec_for(p));
    CAPTURE(dir);
    CHECK(r.residual < 1e-6);
    // Nontrivial terms: the identity is not 0 = 0.
    CHECK(std::abs(r.lhs_volume) + std::abs(r.rhs_boundary) > 1e-3);
  }
}

TEST_CASE("identity with a non-constant coefficient") {
  // U solves Delta U + e^U = 0; with K = e^{0.2 x} and u = U - 0.2 x it solves Delta u + K e^u = 0.
  struct Shifted : ScalarField {
    GlobalFamilyField U{GlobalSolutionParams{0, 10.0, cplx(0.1, -0.2), 1.0}};
    double value(cplx y) const override { return U.value(y) - 0.2 * y.real(); }
    cplx gradient(cplx y) const override { return U.gradient(y) - 0.2; }
  } u;
  const Weight K(0, Coefficient::parse("exp(0.2*x)"));
  PohozaevQuadSpec s;
  s.bubble_centers = {cplx(0.1, -0.2)};
  s.bubble_width = std::exp(-5.0);
  const PohozaevReport r = pohozaev(u, K, cplx(0.2, 0.0), 0.6, cplx(0.6, 0.8), s);
  CHECK(r.residual < 1e-6);
  CHECK(std::abs(r.lhs_volume) > 0.1);
}

TEST_CASE("equal fields give a zero pair difference") {
  const GlobalFamilyField U(GlobalSolutionParams{1, 10.0, 1.0, 1.0});
  const PairDifference d = pair_difference(U, U, 1.0, 0.4, cplx(1.0, 0.0), 512);
  CHECK(d.total == 0.0);
  CHECK(d.t_nu_v_xi_w == 0.0);
}

TEST_CASE("mixed boundary integral is bilinear") {
  const GlobalFamilyField V(GlobalSolutionParams{1, 8.0, 1.0, 1.0});
  struct Lin : ScalarField {
    cplx g;
    explicit Lin(cplx gg) : g(gg) {}
    double value(cplx y) const override { return dot(g, y); }
    cplx gradient(cplx) const override { return g; }
  };
  const Lin a(cplx(1.0, 0.5)), b(cplx(-0.3, 2.0)), ab(cplx(0.7, 2.5));
  const double sa = mixed_boundary_integral(V, a, 1.0, 0.4, 1.0, 1024).total;
  const double sb = mixed_boundary_integral(V, b, 1.0, 0.4, 1.0, 1024).total;
  CHECK(mixed_boundary_integral(V, ab, 1.0, 0.4, 1.0, 1024).total == doctest::Approx(sa + sb).epsilon(1e-12));
}

TEST_CASE("local mass of a bubble") {
  const GlobalSolutionParams p{0, 20.0, 1.0, 1.0};
  const GlobalFamilyField U(p);
  const Weight K(0, Coefficient::one());
  const PohozaevQuadSpec s = spec_for(p);
  CHECK(local_mass(U, K, 1.0, 0.5, [](cplx) { return 1.0; }, s) == doctest::Approx(8 * pi).epsilon(1e-4));
  // f = eta_1 picks up the peak location e_1.
  CHECK(local_mass(U, K, 1.0, 0.5, [](cplx y) { return y.real(); }, s) == doctest::Approx(8 * pi).epsilon(1e-4));
  CHECK(std::abs(local_mass(U, K, 1.0, 0.5, [](cplx y) { return y.imag(); }, s)) < 1e-3);
}

TEST_CASE("pair closed forms") {
  // At N = 1 the two forms coincide: beta_{2l+s} = beta_s mod 2 pi.
  const std::vector<cplx> m{cplx(0.01, 0.02), cplx(-0.03, 0.01)};
  for (int s : {0, 1})
    for (cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)})
      CHECK(pair_closed_form_stated(1, s, m, dir) == doctest::Approx(pair_closed_form_corrected(1, s, m, dir)));
  // Linear in m.
  const std::vector<cplx> m2{cplx(0.01, 0.0), cplx(0.01, 0.0), cplx(0.01, 0.0)};
  const std::vector<cplx> m4{cplx(0.02, 0.0), cplx(0.02, 0.0), cplx(0.02, 0.0)};
  CHECK(pair_closed_form_corrected(2, 1, m4, 1.0) == doctest::Approx(2 * pair_closed_form_corrected(2, 1, m2, 1.0)));
}

TEST_CASE("pair difference follows the corrected closed form at first order") {
  for (int N : {1, 2}) {
    const double lambda = 20.0;
    std::vector<double> err;
    for (double mm : {1e-2, 5e-3}) {
      const cplx factor = 1.0 + mm * cplx(0.6, 0.8);
      const GlobalFamilyField A(GlobalSolutionParams{N, lambda, factor, 1.0});
      const GlobalFamilyField B(GlobalSolutionParams{N, lambda, 1.0, 1.0});
      const std::vector<cplx> m(N + 1, std::pow(factor, 1.0 / (N + 1)) - 1.0);
      const PairDifference pd = pair_difference(A, B, 1.0, 0.5, 1.0, 2048);
      const double c = pair_closed_form_corrected(N, 0, m, 1.0);
      err.push_back(std::abs(pd.total - c) / std::abs(c));
    }
    CAPTURE(N);
    CHECK(err[0] < 0.05);
    // Relative error is O(|m|).
    CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("ball validation") {
  const GlobalFamilyField U(GlobalSolutionParams{0, 2.0, 0.0, 1.0});
  const Weight K(0, Coefficient::one());
  CHECK_THROWS_AS(pohozaev(U, K, 0.0, 0.0, 1.0), Error);
}
