#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "liouville/field.hpp"
#include "liouville/types.hpp"

namespace liouville {

// U(y) = log( e^lambda / (1 + (e^lambda h0 / (8(N+1)^2)) |y^{N+1} - xi|^2)^2 ),
// an entire solution of  Delta U + |y|^{2N} h0 e^U = 0.
struct GlobalSolutionParams {
  int N = 0;
  double lambda = 0.0;
  cplx xi = 0.0;
  double h0 = 1.0;

  void validate() const;
  // log of e^lambda h0 / (8 (N+1)^2)
  double log_a() const;
};

double eval_global(const GlobalSolutionParams& p, cplx y);
cplx grad_global(const GlobalSolutionParams& p, cplx y);
// Five-point Laplacian of U plus |y|^{2N} h0 e^U.
double residual_global(const GlobalSolutionParams& p, cplx y, double fd_step);

struct MassSpec {
  double radius = 0.0;    // <= 0: chosen so the tail bound is below 1e-3 * rel_tol
  double rel_tol = 1e-6;  // requested relative accuracy
  int order = 20;
};

struct MassResult {
  double value = 0.0;       // integral over the disk |y| < radius
  double radius = 0.0;
  double tail_bound = 0.0;  // rigorous bound on the mass outside the disk
  double error_estimate = 0.0;
  double exact = 0.0;       // 8 pi (N+1)
};

MassResult total_mass(const GlobalSolutionParams& p, const MassSpec& spec = {});

// The N+1 maxima of U, refined by damped Newton on the gradient.
std::vector<cplx> local_maxima(const GlobalSolutionParams& p);

struct KernelDerivatives {
  double d_Lambda = 0.0;  // derivative in Lambda = e^lambda
  cplx d_xi;              // Wirtinger derivative in xi
  cplx d_xibar;
  double d_xi1 = 0.0;     // real-coordinate derivatives
  double d_xi2 = 0.0;
};

KernelDerivatives kernel_derivatives(const GlobalSolutionParams& p, cplx z);

struct KernelMatrix {
  std::array<cplx, 3> probes{};
  std::array<double, 3> thetas{};
  double scale_s = 0.0;
  double eps = 0.0;
  Eigen::Matrix3d entries;        // row l: (dLambda, dxi1, dxi2) at p_l
  double det = 0.0;
  cplx det_m1;                    // det of the (dLambda, dxi, dxibar) matrix; det = -2i det_m1
  cplx det_m2;                    // det after normalizing rows by -Lambda and |p3|^{N+1}/2
  cplx det_m2_leading;            // 2i sin((N+1)(theta2-theta1)) s^{3(N+1)eps}
  cplx det_m2_ratio;              // det_m2 / det_m2_leading
  double det_m2_ratio_analytic = 0.0;  // far-field limit of the ratio at finite s
};

KernelMatrix build_kernel_matrix(const GlobalSolutionParams& p, double s, double eps,
                                 const std::array<double, 3>& thetas);

// Probe angles (0, pi/(4(N+1)), pi/(2(N+1))).
std::array<double, 3> default_probe_angles(int N);

class GlobalFamilyField : public ScalarField {
 public:
  explicit GlobalFamilyField(GlobalSolutionParams p) : p_(p) { p_.validate(); }
  double value(cplx y) const override { return eval_global(p_, y); }
  cplx gradient(cplx y) const override { return grad_global(p_, y); }
  const GlobalSolutionParams& params() const { return p_; }

 private:
  GlobalSolutionParams p_;
};

}  // namespace liouville
