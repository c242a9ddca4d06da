#include "liouville/circulant_algebra.hpp"

#include <Eigen/LU>

namespace liouville {

namespace {

using ld = long double;

struct Acc {
  ld re = 0, im = 0;
  void add(cplx z) {
    re += z.real();
    im += z.imag();
  }
  cplx value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

// sum_{s=a}^{b} e^{i m beta_s}, with 1/(1 - e^{i m beta_1}) computed once per m.
struct Geometric {
  const CirculantSystem& sys;
  long m;
  bool degenerate;
  cplx inv_one_minus_r;

  Geometric(const CirculantSystem& s, long m_) : sys(s), m(m_) {
    const long n1 = sys.N + 1;
    const long mr = ((m % n1) + n1) % n1;
    degenerate = mr == 0;
    // 1 - e^{i t} = -2i sin(t/2) e^{i t/2}, with t = 2 pi m/(N+1).
    const double half = pi * static_cast<double>(mr) / static_cast<double>(n1);
    if (!degenerate) inv_one_minus_r = 1.0 / (cplx(0.0, -2.0 * std::sin(half)) * std::polar(1.0, half));
  }

  cplx operator()(long a, long b) const {
    if (b < a) return 0.0;
    if (degenerate) return static_cast<double>(b - a + 1);
    return (sys.e(m * a) - sys.e(m * (b + 1))) * inv_one_minus_r;
  }
};

}  // namespace

double CirculantSystem::dk(long k) const {
  const long n1 = N + 1;
  if (k < 0 || k >= n1) {
    k %= n1;
    if (k < 0) k += n1;
  }
  return d[static_cast<std::size_t>(k)];
}

CirculantSystem build(int N, bool dense) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "circulant system needs N >= 1");
  if (N > kLightCap) throw Error(ErrorCode::SizeCap, "N exceeds " + std::to_string(kLightCap));
  if (dense && N > kDenseCap)
    throw Error(ErrorCode::SizeCap, "dense inversion capped at N = " + std::to_string(kDenseCap));
  CirculantSystem sys;
  sys.N = N;
  const int n1 = N + 1;
  sys.d.assign(static_cast<std::size_t>(n1), 0.0);
  // d_j = d_{N+1-j}; fill both ends so the palindrome is exact.
  for (int j = 1; 2 * j <= n1; ++j) {
    const double sn = std::sin(pi * j / n1);
    sys.d[static_cast<std::size_t>(j)] = sys.d[static_cast<std::size_t>(n1 - j)] = 1.0 / (sn * sn);
  }
  ld D = 0;
  for (int j = 1; j <= N; ++j) D += sys.d[static_cast<std::size_t>(j)];
  sys.D = static_cast<double>(D);
  sys.Lambda_const = sys.D - 2.0 * N;
  sys.beta.resize(static_cast<std::size_t>(n1));
  for (int l = 0; l <= N; ++l) sys.beta[static_cast<std::size_t>(l)] = two_pi * l / n1;
  // Conjugate symmetry halves the trigonometric work.
  sys.roots.resize(static_cast<std::size_t>(n1));
  for (int l = 0; 2 * l <= n1; ++l) {
    const cplx z = root_of_unity(l, n1);
    sys.roots[static_cast<std::size_t>(l)] = z;
    if (l > 0) sys.roots[static_cast<std::size_t>(n1 - l)] = std::conj(z);
  }

  if (dense) {
    sys.dense = true;
    sys.A.resize(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) sys.A(i, j) = i == j ? sys.D : -sys.dk(std::abs(i - j));
    sys.A_inv = sys.A.partialPivLu().inverse();
    auto norm1 = [](const Eigen::MatrixXd& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); };
    sys.condition_number = norm1(sys.A) * norm1(sys.A_inv);
  }
  return sys;
}

Eigen::MatrixXd dft_inverse(int N) {
  const CirculantSystem sys = build(N, false);
  const int n1 = N + 1;
  std::vector<double> lam(static_cast<std::size_t>(n1), 0.0);
  for (int k = 1; k <= N; ++k) {
    ld s = sys.D;
    for (int j = 1; j <= N; ++j) s -= sys.dk(j) * sys.e(static_cast<long>(j) * k).real();
    lam[static_cast<std::size_t>(k)] = static_cast<double>(s);
  }
  std::vector<double> g(static_cast<std::size_t>(n1), 0.0);
  for (int m = 0; m <= N; ++m) {
    ld s = 0;
    for (int k = 1; k <= N; ++k) s += sys.e(static_cast<long>(k) * m).real() / lam[static_cast<std::size_t>(k)];
    g[static_cast<std::size_t>(m)] = static_cast<double>(s / n1);
  }
  auto G = [&](int m) { return g[static_cast<std::size_t>(((m % n1) + n1) % n1)]; };
  Eigen::MatrixXd inv(N, N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) inv(i - 1, j - 1) = G(i - j) - G(i) - G(j) + G(0);
  return inv;
}

IdentityReport make_report(std::string name, int N, int index, cplx lhs, cplx rhs, double tol,
                           bool relative, double scale) {
  IdentityReport r;
  r.name = std::move(name);
  r.N = N;
  r.index = index;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_error = std::abs(lhs - rhs);
  r.scale = std::max(std::abs(rhs), scale);
  r.rel_error = r.abs_error / r.scale;
  r.tol = tol;
  r.relative = relative;
  r.pass = (relative ? r.rel_error : r.abs_error) <= tol;
  return r;
}

std::vector<IdentityReport> verify_light_identities(const CirculantSystem& sys, double tol,
                                                    bool relative) {
  const int N = sys.N;
  Acc s;
  for (int l = 1; l <= N; ++l) s.add(sys.dk(l) * sys.e(l));
  std::vector<IdentityReport> out;
  out.push_back(make_report("root_sum", N, 0, sys.D - s.value(), 2.0 * N, tol, relative, sys.D));
  out.push_back(make_report("D_closed_form", N, 0, sys.D, N * (N + 2.0) / 3.0, tol, relative, sys.D));
  return out;
}

std::vector<IdentityReport> verify_identities(const CirculantSystem& sys, double tol) {
  if (!sys.dense) throw Error(ErrorCode::InvalidArgument, "verify_identities needs the dense system");
  const int N = sys.N;
  std::vector<IdentityReport> out = verify_light_identities(sys, tol, false);

  for (int i = 1; i <= N; ++i) {
    Acc s;
    for (int j = 1; j <= N; ++j) s.add(sys.a(i, j) * sys.dk(N + 1 - j));
    out.push_back(make_report("inverse_row", N, i, s.value(), 1.0, tol, false, 1.0));
  }
  {
    Acc q, r;
    for (int s = 1; s <= N; ++s)
      for (int t = 1; t <= N; ++t) {
        q.add(sys.a(s, t) * sys.e(s) * sys.e(-t));
        r.add(sys.e(s) * sys.a(s, t) * sys.e(t));
      }
    out.push_back(make_report("quadratic_form", N, 0, q.value(), (N + 1.0) / (2.0 * N), tol, false, 1.0));
    out.push_back(make_report("bilinear_form", N, 0, r.value(), 0.0, tol, false, 1.0));
  }
  for (int s = 1; s <= N; ++s) {
    Acc q;
    for (int j = 1; j <= N; ++j) q.add(sys.a(s, j) * sys.e(j));
    out.push_back(
        make_report("inverse_on_roots", N, s, q.value(), (sys.e(s) - 1.0) / (2.0 * N), tol, false, 1.0));
  }
  for (int s = 1; s <= N; ++s) {
    Acc q;
    q.add(-sys.dk(N + 1 - s));
    for (int j = 1; j <= N; ++j) q.add(sys.A(s - 1, j - 1) * sys.e(j));
    out.push_back(make_report("matrix_on_roots", N, s, q.value(), 2.0 * N * sys.e(s), tol, false, sys.D));
  }
  return out;
}

SumChainValues sum_chain_brute(const CirculantSystem& sys) {
  const int N = sys.N;
  Acc a11, a12, a15, a14, d2;
  for (int s = 1; s <= N; ++s) {
    for (int l = 1; l <= N; ++l) {
      if (l == s) continue;
      const double d = sys.dk(std::abs(l - s));
      a11.add(d * sys.e(l - s));
      a12.add(d * sys.e(l));
      a15.add(d * sys.e(2L * l) * sys.e(s - l));
      a14.add(d * sys.e(3L * l) * sys.e(s - l));
    }
    d2.add(sys.dk(s) * sys.e(2L * s));
  }
  return {a11.value(), a12.value(), a15.value(), a14.value(), d2.value()};
}

SumChainValues sum_chain_fast(const CirculantSystem& sys) {
  // Group the double sums by k = l - s; s then runs over a contiguous range
  // and each inner sum is geometric.
  const long N = sys.N;
  Acc a11, a12, a15, a14, d2;
  const Geometric g1(sys, 1), g2(sys, 2), g3(sys, 3);
  for (long k = -(N - 1); k <= N - 1; ++k) {
    if (k == 0) continue;
    const double d = sys.dk(std::labs(k));
    const long lo = std::max(1L, 1 - k), hi = std::min(N, N - k);
    a11.add(d * static_cast<double>(hi - lo + 1) * sys.e(k));
    a12.add(d * sys.e(k) * g1(lo, hi));
    a15.add(d * sys.e(k) * g2(lo, hi));
    a14.add(d * sys.e(2 * k) * g3(lo, hi));
  }
  for (long l = 1; l <= N; ++l) d2.add(sys.dk(l) * sys.e(2 * l));
  return {a11.value(), a12.value(), a15.value(), a14.value(), d2.value()};
}

SumChainClosedForms sum_chain_closed(const CirculantSystem& sys) {
  const int N = sys.N;
  const double Lam = sys.Lambda_const, D = sys.D;
  SumChainClosedForms c;
  c.phase_difference = (N - 1) * Lam;
  c.single_phase = -Lam - D;
  c.double_phase = -2.0 * Lam;
  c.d2 = -4.0 * (N - 1) + D;
  c.triple_stated = -Lam - c.d2;
  const double e3 = Geometric(sys, 3)(1, N).real();
  c.triple_general = Lam * e3 - c.d2;
  return c;
}

std::vector<IdentityReport> verify_sum_chain(const CirculantSystem& sys, double tol, bool fast,
                                             bool relative) {
  const SumChainValues v = fast ? sum_chain_fast(sys) : sum_chain_brute(sys);
  const SumChainClosedForms c = sum_chain_closed(sys);
  const int N = sys.N;
  const double sc = sys.D;
  std::vector<IdentityReport> out;
  out.push_back(make_report("chain_phase_difference", N, 0, v.phase_difference, c.phase_difference, tol, relative, sc));
  out.push_back(make_report("chain_single_phase", N, 0, v.single_phase, c.single_phase, tol, relative, sc));
  out.push_back(make_report("chain_double_phase", N, 0, v.double_phase, c.double_phase, tol, relative, sc));
  out.push_back(make_report("chain_triple_phase", N, 0, v.triple_phase, c.triple_stated, tol, relative, sc));
  out.push_back(make_report("chain_triple_phase_general", N, 0, v.triple_phase, c.triple_general, tol, relative, sc));
  out.push_back(make_report("double_root_sum", N, 0, v.d2, c.d2, tol, relative, sc));
  return out;
}

NondegeneracyReport nondegeneracy_constant(const CirculantSystem& sys) {
  const int N = sys.N;
  NondegeneracyReport r;
  r.N = N;
  r.Lambda_const = sys.Lambda_const;
  r.D = sys.D;
  r.g = sys.Lambda_const / 2.0 + sys.D / (2.0 * N) + 1.0 - 2.0 / N + 1.0;
  r.closed_form = (N - 1.0) * (N - 2.0) / 6.0 + 2.0 - 2.0 / N;
  r.abs_error = std::abs(r.g - r.closed_form);
  if (N == 1) {
    r.n1_dichotomy = true;
    r.left_coefficient = -1.0;
    r.right_coefficient = 0.0;
  }
  if (sys.dense) {
    Acc lhs, rhs;
    for (int s = 1; s <= N; ++s) {
      Acc inner;
      for (int j = 1; j <= N; ++j) inner.add(sys.a(s, j) * sys.e(s - j));
      lhs.add(1.0 - 2.0 * N * inner.value());
      for (int l = 1; l <= N; ++l) {
        if (l == s) continue;
        const double d = sys.dk(std::abs(l - s));
        for (int j = 1; j <= N; ++j)
          rhs.add(d * (sys.a(s, j) * sys.e(l - j) - sys.a(l, j) * sys.e(2L * l + s - j)));
      }
    }
    r.brute_lhs = lhs.value();
    r.brute_rhs = rhs.value();
    r.brute_gap = r.brute_rhs - r.brute_lhs;
  }
  return r;
}

}  // namespace liouville
