#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "liouville/types.hpp"

namespace liouville {

inline constexpr int kDenseCap = 10000;    // dense A and A^{-1}
inline constexpr int kLightCap = 100000;   // sums that need only d and beta

// d_j = 1/sin^2(j pi/(N+1)), D = sum d_j, A = circulant block with diagonal D
// and off-diagonal -d_{|i-j|}, beta_l = 2 pi l/(N+1), Lambda_const = D - 2N.
struct CirculantSystem {
  int N = 0;
  std::vector<double> d;     // d[j] for j = 0..N, d[0] unused (0)
  double D = 0.0;
  double Lambda_const = 0.0;
  std::vector<double> beta;  // beta[l], l = 0..N
  std::vector<cplx> roots;   // e^{i beta_l}, l = 0..N
  bool dense = false;        // A and A_inv populated
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_inv;
  double condition_number = 0.0;  // 1-norm

  // d_{|k|} with the index reduced mod N+1; d_0 = 0.
  double dk(long k) const;
  // e^{i beta_l} for any integer l.
  cplx e(long l) const {
    const long n1 = N + 1;
    // Callers mostly pass small multiples of N; subtract before dividing.
    if (l >= 4 * n1 || l < -4 * n1) l %= n1;
    while (l >= n1) l -= n1;
    while (l < 0) l += n1;
    return roots[static_cast<std::size_t>(l)];
  }
  // a^{st}, 1-based.
  double a(int s, int t) const { return A_inv(s - 1, t - 1); }
};

CirculantSystem build(int N, bool dense = true);

// A^{-1} through the DFT of the grounded circulant Laplacian (independent oracle).
Eigen::MatrixXd dft_inverse(int N);

struct IdentityReport {
  std::string name;
  int N = 0;
  int index = 0;      // s-index for per-row identities, 0 otherwise
  cplx lhs;
  cplx rhs;
  double abs_error = 0.0;
  double rel_error = 0.0;  // abs_error / max(|rhs|, scale)
  double scale = 1.0;
  double tol = 0.0;
  bool relative = false;   // which error the tolerance applies to
  bool pass = false;
};

IdentityReport make_report(std::string name, int N, int index, cplx lhs, cplx rhs, double tol,
                           bool relative, double scale);

// root_sum, inverse_row (per row), quadratic_form, bilinear_form, inverse_on_roots (per row),
// matrix_on_roots (per row), D_closed_form.
std::vector<IdentityReport> verify_identities(const CirculantSystem& sys, double tol);

// root_sum and D_closed_form only; needs no matrix.
std::vector<IdentityReport> verify_light_identities(const CirculantSystem& sys, double tol,
                                                    bool relative);

// The double sums over s, l = 1..N, l != s and the single sum sum_l d_l e^{i beta_{2l}}.
struct SumChainValues {
  cplx phase_difference;  // sum d_{|l-s|} e^{i(beta_l - beta_s)}
  cplx single_phase;      // sum d_{|l-s|} e^{i beta_l}
  cplx double_phase;      // sum d_{|l-s|} e^{i beta_{2l}} e^{i beta_{s-l}}
  cplx triple_phase;      // sum d_{|l-s|} e^{i beta_{3l}} e^{i beta_{s-l}}
  cplx d2;                // sum_l d_l e^{i beta_{2l}}
};

SumChainValues sum_chain_brute(const CirculantSystem& sys);
SumChainValues sum_chain_fast(const CirculantSystem& sys);

// Closed forms. triple_stated is -Lambda - sum d_l e^{i beta_{2l}}; triple_general replaces
// -Lambda by Lambda * sum_l e^{3 i beta_l}, which differs only when N + 1 divides 3.
struct SumChainClosedForms {
  double phase_difference, single_phase, double_phase, triple_stated, triple_general, d2;
};
SumChainClosedForms sum_chain_closed(const CirculantSystem& sys);

// Reports against the stated closed forms (the triple-phase sum also against the general form).
std::vector<IdentityReport> verify_sum_chain(const CirculantSystem& sys, double tol, bool fast,
                                             bool relative);

struct NondegeneracyReport {
  int N = 0;
  double Lambda_const = 0.0;
  double D = 0.0;
  double g = 0.0;            // Lambda/2 + D/(2N) + 1 - 2/N + 1
  double closed_form = 0.0;  // (N-1)(N-2)/6 + 2 - 2/N
  double abs_error = 0.0;
  bool n1_dichotomy = false; // N = 1: left coefficient -1, right 0
  double left_coefficient = 0.0;
  double right_coefficient = 0.0;
  // Brute-force evaluation of both sides of the summed coefficient condition
  // (requires the dense system); NaN when unavailable.
  cplx brute_lhs{NAN, NAN};
  cplx brute_rhs{NAN, NAN};
  cplx brute_gap{NAN, NAN};  // brute_rhs - brute_lhs, the quantity g is meant to equal
};

NondegeneracyReport nondegeneracy_constant(const CirculantSystem& sys);

}  // namespace liouville
