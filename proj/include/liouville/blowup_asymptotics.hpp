#pragma once

#include <array>
#include <string>
#include <vector>

#include "liouville/circulant_algebra.hpp"
#include "liouville/field.hpp"
#include "liouville/global_family.hpp"
#include "liouville/pohozaev_quadrature.hpp"

namespace liouville {

struct BlowupData {
  int N = 0;
  double delta = 0.0;  // radius of the first peak
  double mu = 0.0;     // scaled height of the first peak
  cplx L;              // d1 log h(0) + i d2 log h(0)
  double sigma = 0.0;  // max_l |Q_l - e^{i beta_l}|
  std::vector<cplx> m; // Q_l e^{-i beta_l} - 1, m_0 = 0
  std::vector<cplx> Q;
  double theta = 0.0;  // angle of the first peak
  std::vector<double> peak_heights;  // scaled heights v(Q_l)
};

// Displacement predictions. L is the complex gradient of log h at 0 in the
// frame where the first blowup point sits on the positive real axis.
struct DisplacementPrediction {
  std::vector<cplx> closed_form;  // m_l = delta conj(L) (e^{i beta_l} - 1)/(2N)
  std::vector<cplx> linear_solve; // A m = conj(L) delta (e^{i beta_1}, ..., e^{i beta_N})
  std::vector<cplx> opposite;     // the opposite sign convention: A m = -conj(L) delta e
  double max_diff = 0.0;          // |closed_form - linear_solve|_inf
  double summed_residual = 0.0;    // |-sum_j d_j m_j - conj(L) delta|
};

DisplacementPrediction predict_displacements(const CirculantSystem& sys, double delta, cplx L);

// The N = 1 component system written out coordinate by coordinate, which
// yields m_1 = +delta conj(L).
cplx n1_system_displacement(double delta, cplx L);

// Pohozaev adjudication of the displacement sign. For each convention the
// blowup points Q_l = e^{i beta_l}(1 + m_l) define the far-field correction
// w = sum_l (-4 log|y - Q_l| + 4 log|y - e^{i beta_l}|) around the reference
// family V (xi = 1). The mixed boundary integral of (V, w) on a circle around
// e^{i beta_s} must equal the change 8 pi [(2N/conj(Q_s) + delta L) - 2N e^{i beta_s}] . xi
// of the volume side; the right sign leaves an O(delta^2) residual.
struct SignAdjudication {
  int N = 0;
  double delta = 0.0;
  cplx L;
  double residual_closed = 0.0;    // convention of the closed form
  double residual_opposite = 0.0;  // opposite convention
  double scale = 0.0;              // size of the predicted change
  std::string adjudicated;         // "closed_form" or "opposite"
};

SignAdjudication adjudicate_sign(int N, double delta, cplx L, double lambda = 20.0,
                                 double ball_radius = 0.25, int boundary_nodes = 2048);

// -mu + log 8 + 4 log(1+N) - 4(1+N) log(tau/delta), the stated law.
double boundary_value_law(int N, double mu, double delta, double tau);
// The same law with the far field of the local bubble expanded exactly:
// -mu + 2 log 8 + 4 log(1+N) - 4(1+N) log(tau/delta).
double boundary_value_law_exact(int N, double mu, double delta, double tau);

struct VanishingBounds {
  double first_order = 0.0;   // delta + mu e^{-mu}/delta
  double second_order = 0.0;  // delta + mu e^{-mu}/delta^2
};
VanishingBounds vanishing_rates(double delta, double mu);

// Damped Newton on grad v = 0 from y0, finite-difference Hessian with step 1e-6 * scale.
cplx refine_maximum(const ScalarField& v, cplx y0, double scale, int* iterations = nullptr);

struct GlobalFit {
  GlobalSolutionParams params;
  cplx peak;
  double sup_difference = 0.0;            // over all samples
  double sup_difference_outside = 0.0;    // over samples outside the bubble disks
  int newton_iterations = 0;
};

struct GlobalFitOptions {
  bool refine_peak = true;         // Newton on the gradient from the guessed peak
  double bubble_exclusion = 0.0;   // radius of excluded disks around the family maxima
  cplx known_peak = 0.0;           // used when refine_peak is false
  double known_height = 0.0;
};

// Fits (lambda, xi) to the first bubble: lambda = v(peak), xi = peak^{N+1}.
GlobalFit compare_to_global(const ScalarField& v, const std::vector<cplx>& samples,
                            const GlobalSolutionParams& guess, const GlobalFitOptions& opt = {});

struct ThreePointMatch {
  GlobalSolutionParams params;
  int iterations = 0;
  double max_scaled_residual = 0.0;  // max |v - V|/(eps log(2 + |y|))
  double eps = 0.0;                  // e^{-lambda/(2(N+1))}
  std::array<cplx, 3> probes{};
  double det = 0.0;
};

std::array<cplx, 3> three_point_probes(double s, double eps, const std::array<double, 3>& thetas);

// Solves v(p_l) = V(p_l; lambda, xi), l = 1, 2, 3 by Newton with kernel derivatives.
ThreePointMatch three_point_match(const ScalarField& v, const std::array<cplx, 3>& probes,
                               const GlobalSolutionParams& guess,
                               const std::vector<cplx>& samples, double eps_scale = -1.0,
                               int max_iterations = 30);

// Far-field logarithmic correction to a family: sum_l c_l log|y - a_l|.
class LogField : public ScalarField {
 public:
  void add(cplx at, double coeff) { terms_.push_back({at, coeff}); }
  double value(cplx p) const override;
  cplx gradient(cplx p) const override;

 private:
  struct Term {
    cplx at;
    double c;
  };
  std::vector<Term> terms_;
};

}  // namespace liouville
