#include "doctest.h"
#include "liouville/circulant_algebra.hpp"
#include "oracles.hpp"

using namespace liouville;

namespace {
const IdentityReport& find(const std::vector<IdentityReport>& v, const std::string& name, int index = 0) {
  for (const IdentityReport& r : v)
    if (r.name == name && r.index == index) return r;
  FAIL("missing report " << name);
  return v.front();
}
}  // namespace

TEST_CASE("small systems by hand") {
  const CirculantSystem s1 = build(1);
  CHECK(s1.d[1] == doctest::Approx(1.0));
  CHECK(s1.D == doctest::Approx(1.0));
  CHECK(s1.A(0, 0) == doctest::Approx(1.0));

  const CirculantSystem s2 = build(2);
  CHECK(s2.d[1] == doctest::Approx(4.0 / 3));
  CHECK(s2.D == doctest::Approx(8.0 / 3));
  CHECK(s2.A(0, 1) == doctest::Approx(-4.0 / 3));
  CHECK(s2.A_inv(0, 0) == doctest::Approx(0.5));
  CHECK(s2.A_inv(0, 1) == doctest::Approx(0.25));

  const CirculantSystem s3 = build(3);
  CHECK(s3.d[1] == doctest::Approx(2.0));
  CHECK(s3.d[2] == doctest::Approx(1.0));
  CHECK(s3.D == doctest::Approx(5.0));
}

TEST_CASE("inverse agrees with two independent inversions") {
  for (int N : {1, 2, 5, 17, 40}) {
    const CirculantSystem s = build(N);
    const Eigen::MatrixXd ref = oracle::circulant_A(N).inverse();
    CHECK((s.A_inv - ref).cwiseAbs().maxCoeff() < 1e-12 * (1 + ref.cwiseAbs().maxCoeff()));
    CHECK((dft_inverse(N) - ref).cwiseAbs().maxCoeff() < 1e-12 * (1 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("hand-evaluated identities at N = 2") {
  const auto r = verify_identities(build(2), 1e-12);
  const IdentityReport& inv = find(r, "inverse_on_roots", 1);
  CHECK(std::abs(inv.lhs - cplx(-3.0 / 8, std::sqrt(3.0) / 8)) < 1e-14);
  CHECK(find(r, "quadratic_form").lhs.real() == doctest::Approx(0.75));
  for (const IdentityReport& x : r) {
    CAPTURE(x.name);
    CHECK(x.pass);
  }
}

TEST_CASE("identity sweep to N = 100") {
  for (int N = 2; N <= 100; ++N) {
    const CirculantSystem s = build(N);
    for (const IdentityReport& x : verify_identities(s, 1e-8)) {
      CAPTURE(N);
      CAPTURE(x.name);
      CHECK(x.pass);
    }
  }
}

TEST_CASE("the bilinear form does not vanish at N = 1") {
  // With N = 1 the sum has the single term e^{i pi} * 1 * e^{i pi} = 1.
  const IdentityReport& b = find(verify_identities(build(1), 1e-8), "bilinear_form");
  CHECK(std::abs(b.lhs - 1.0) < 1e-14);
  CHECK_FALSE(b.pass);
}

TEST_CASE("sum chain: fast and brute force agree with direct sums") {
  for (int N : {1, 2, 3, 4, 5, 8, 13, 30}) {
    const CirculantSystem s = build(N);
    const SumChainValues f = sum_chain_fast(s), b = sum_chain_brute(s);
    cplx direct = 0.0;
    for (int sl = 1; sl <= N; ++sl)
      for (int l = 1; l <= N; ++l)
        if (l != sl) direct += oracle::d(N, std::abs(l - sl)) * oracle::e(l, N);
    CAPTURE(N);
    CHECK(std::abs(b.single_phase - direct) < 1e-10 * s.D * N);
    CHECK(std::abs(f.phase_difference - b.phase_difference) < 1e-10 * s.D * N);
    CHECK(std::abs(f.single_phase - b.single_phase) < 1e-10 * s.D * N);
    CHECK(std::abs(f.double_phase - b.double_phase) < 1e-10 * s.D * N);
    CHECK(std::abs(f.triple_phase - b.triple_phase) < 1e-10 * s.D * N);
    CHECK(std::abs(f.d2 - b.d2) < 1e-10 * s.D);
  }
}

TEST_CASE("double-root sum in both parities") {
  CHECK(sum_chain_brute(build(2)).d2.real() == doctest::Approx(-4.0 / 3));
  const CirculantSystem s5 = build(5), s4 = build(4);
  CHECK(sum_chain_brute(s5).d2.real() == doctest::Approx(-16.0 + s5.D));
  CHECK(sum_chain_brute(s4).d2.real() == doctest::Approx(-12.0 + s4.D));
}

TEST_CASE("stated sum chain closed forms and their exceptions") {
  for (int N = 3; N <= 60; ++N) {
    if (N == 2) continue;
    for (const IdentityReport& x : verify_sum_chain(build(N), 1e-8, false, false)) {
      CAPTURE(N);
      CAPTURE(x.name);
      CHECK(x.pass);
    }
  }
  // N + 1 = 3: e^{3 i beta_l} = 1, so the sum of these phases is N, not -1,
  // and the stated triple-phase form is off by 3 Lambda.
  const auto r2 = verify_sum_chain(build(2), 1e-8, false, false);
  CHECK_FALSE(find(r2, "chain_triple_phase").pass);
  CHECK(find(r2, "chain_triple_phase_general").pass);
  const CirculantSystem s2 = build(2);
  CHECK(std::abs(find(r2, "chain_triple_phase").lhs - find(r2, "chain_triple_phase").rhs) ==
        doctest::Approx(3.0 * std::abs(s2.Lambda_const)));
  // N = 1: both double sums are empty.
  const auto r1 = verify_sum_chain(build(1), 1e-8, false, false);
  CHECK(std::abs(find(r1, "chain_double_phase").lhs) == 0.0);
  CHECK_FALSE(find(r1, "chain_double_phase").pass);
}

TEST_CASE("matrix-free sweep at large N") {
  for (int N : {1000, 54321, 100000}) {
    const CirculantSystem s = build(N, false);
    CHECK_FALSE(s.dense);
    for (const IdentityReport& x : verify_light_identities(s, 1e-6, true)) CHECK(x.pass);
    const auto chain = verify_sum_chain(s, 1e-6, true, true);
    CHECK(find(chain, "chain_single_phase").pass);
    CHECK(find(chain, "double_root_sum").pass);
  }
}

TEST_CASE("non-degeneracy constant") {
  CHECK(nondegeneracy_constant(build(2)).g == doctest::Approx(1.0));
  CHECK(nondegeneracy_constant(build(3)).g == doctest::Approx(5.0 / 3));
  for (int N = 2; N <= 100; ++N) {
    const NondegeneracyReport r = nondegeneracy_constant(build(N));
    CHECK(r.abs_error < 1e-10);
    CHECK(r.g >= 1.0 - 1e-12);
    // The brute-force coefficient gap equals g except at N = 2, where the
    // e^{i beta_{2l+s}} phases collapse and the gap vanishes.
    if (N == 2) CHECK(std::abs(r.brute_gap) < 1e-12);
    else CHECK(std::abs(r.brute_gap.real() - r.g) < 1e-8 * (1 + r.g));
  }
  const NondegeneracyReport n1 = nondegeneracy_constant(build(1));
  CHECK(n1.n1_dichotomy);
  CHECK(n1.left_coefficient == -1.0);
}

TEST_CASE("size caps") {
  CHECK_THROWS_AS(build(0), Error);
  CHECK_THROWS_AS(build(kDenseCap + 1, true), Error);
  CHECK_THROWS_AS(build(kLightCap + 1, false), Error);
  CHECK_THROWS_AS(verify_identities(build(5, false), 1e-8), Error);
}
