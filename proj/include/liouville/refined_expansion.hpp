#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "liouville/liouville_solver.hpp"

namespace liouville {

// Refined local expansion of a regular (N = 0) bubble around its maximum x0:
//   u(x) ~ log( e^{u0} / (1 + (V0/8) e^{u0} |x - x0 - q|^2)^2 ) + psi(x)
//          - 8 (Delta log V / V)(x0) eps^2 (log(2 + |x - x0|/eps))^2,
// with eps = e^{-u0/2}, psi the harmonic lift of the boundary oscillation
// (psi(x0) = 0) and q the shift of the maximum once psi is removed.
struct RefinedExpansion {
  double u0 = 0.0;
  double eps = 0.0;
  cplx x0;
  cplx q;                     // argmax(u - psi) - x0, measured
  cplx q_predicted;           // 2 eps^2 grad V(x0) / V(x0)^2
  double V0 = 0.0;
  cplx grad_V0;
  double lap_log_V0 = 0.0;
  double log_coefficient = 0.0;  // -8 Delta log V(x0) / V(x0)
  HarmonicLift psi;
  double vanishing = 0.0;        // |grad(log V + psi)(x0)|
  double remainder = 0.0;        // sup over nodes of |u - expansion|
  double remainder_scale = 0.0;  // eps^2 log(1/eps)
  double remainder_ratio = 0.0;
  std::vector<std::pair<double, double>> profile;  // (ring radius, max remainder on the ring)
};

// Throws NotSingleBubble unless the solution has exactly one peak; N must be 0.
RefinedExpansion refined_expansion(const SolutionField& sol, const DiskProblem& problem,
                           int boundary_samples = 512);

struct ExpansionSweepSpec {
  Coefficient V;                             // V(0) = 1
  double tau = 1.0;
  std::function<double(double)> oscillation;  // mean-zero boundary oscillation; empty: none
  std::vector<double> eps;                   // target bubble scales
  int n_r = 320;
  int n_theta = 128;
  SolveOptions solve;
};

struct ExpansionSweepResult {
  std::vector<RefinedExpansion> points;
  std::vector<double> target_eps;
  bool terminated = false;
  std::string reason;
};

// Solves the N = 0 problem with boundary data c(eps) + oscillation for each
// target eps (largest first, warm-started) and runs refined_expansion on each.
ExpansionSweepResult expansion_sweep(const ExpansionSweepSpec& spec);

// Radially graded grid for a bubble of scale eps_min at the origin.
GridSpec expansion_grid(double tau, double eps_min, int n_r, int n_theta);

}  // namespace liouville
