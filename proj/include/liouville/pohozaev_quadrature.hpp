#pragma once

#include <functional>
#include <vector>

#include "liouville/coefficient.hpp"
#include "liouville/field.hpp"
#include "liouville/quadrature.hpp"

namespace liouville {

struct PohozaevQuadSpec {
  int boundary_nodes = 2048;  // trapezoid on the circle
  int order = 20;             // Gauss-Legendre order for the volume term
  double inner_fraction = 1e-9;
  std::vector<cplx> bubble_centers;  // extra radial/angular grading inside the ball
  double bubble_width = 1e-3;
};

struct PohozaevReport {
  cplx center;
  double r = 0.0;
  cplx xi_dir;
  double lhs_volume = 0.0;    // int d_xi(K) e^u
  double lhs_flux = 0.0;      // int_{boundary} K e^u (xi . nu)
  double rhs_boundary = 0.0;  // int_{boundary} (d_nu u d_xi u - |grad u|^2 (xi . nu)/2)
  double residual = 0.0;
  double tolerance_budget = 0.0;  // error budget attached by the caller
};

PohozaevReport pohozaev(const ScalarField& u, const Weight& K, cplx center, double r, cplx xi_dir,
                        const PohozaevQuadSpec& spec = {});

struct PairDifference {
  double t_nu_v_xi_w = 0.0;   // int d_nu V d_xi w
  double t_nu_w_xi_v = 0.0;   // int d_nu w d_xi V
  double t_cross = 0.0;       // -int (grad V . grad w)(xi . nu)
  double total = 0.0;
};

// Mixed boundary integral of w = uA - uB against V = uB on the circle |y - center| = r.
PairDifference pair_difference(const ScalarField& uA, const ScalarField& uB, cplx center, double r,
                               cplx xi_dir, int boundary_nodes = 2048);

// Same, with w and V given directly.
PairDifference mixed_boundary_integral(const ScalarField& V, const ScalarField& w, cplx center,
                                       double r, cplx xi_dir, int boundary_nodes = 2048);

// 8 pi sum_{l=0..N, l != s} d_{|l-s|}(conj(m_s) e^{i beta_l} - conj(m_l) e^{i beta_{2l+s}}) . xi
double pair_closed_form_stated(int N, int s, const std::vector<cplx>& m, cplx xi_dir);
// 8 pi sum_{l=0..N, l != s} d_{|l-s|}(conj(m_s) e^{i beta_l} - conj(m_l) e^{i beta_s}) . xi
double pair_closed_form_corrected(int N, int s, const std::vector<cplx>& m, cplx xi_dir);

// int_{B(center, r)} f K e^u
double local_mass(const ScalarField& u, const Weight& K, cplx center, double r,
                  const std::function<double(cplx)>& f, const PohozaevQuadSpec& spec = {});

// Polar rule on the ball graded toward its center and the listed bubbles.
PolarRule ball_rule(cplx center, double r, const PohozaevQuadSpec& spec);

}  // namespace liouville
