#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "liouville/blowup_asymptotics.hpp"
#include "liouville/coefficient.hpp"
#include "liouville/disk_green.hpp"
#include "liouville/polar_grid.hpp"

namespace liouville {

// Delta u + |x|^{2N} h(x) e^u = 0 in B_tau, u = boundary data on the circle.
struct DiskProblem {
  int N = 0;
  double tau = 1.0;
  Coefficient h;
  GridSpec grid;
  double boundary_value = 0.0;
  // Optional angular boundary data; when set it replaces boundary_value.
  // Used by manufactured solutions whose traces are not constant.
  std::function<double(double)> boundary;

  // h > 0 on the closed disk (sampled), h(0) = 1, n_theta a multiple of 4(N+1),
  // grid.tau == tau. Throws InvalidArgument.
  void validate() const;
  double boundary_at(double theta) const { return boundary ? boundary(theta) : boundary_value; }
};

struct Peak {
  cplx location;
  double height = 0.0;
  int i = 0, j = 0;         // discrete maximum node
  double resolution = 0.0;  // spacing * sqrt(K e^u): grid spacing over bubble width
};

struct SolveOptions {
  double tol = 1e-10;       // on max |F| of the finite-volume residual
  int max_iterations = 60;
  double min_step = 1.0 / 1024.0;
};

struct SolutionField {
  PolarGrid grid;
  GridField u;
  std::vector<Peak> peaks;   // sorted by angle, normalized to [-pi/(N+1), 2pi - pi/(N+1))
  double mu = 0.0;           // first peak height + 2(N+1) log delta (N >= 1), else max u
  double delta = 0.0;        // |first peak|
  double theta = 0.0;        // arg of the first peak
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // l2 norms, one per accepted iterate
  bool monotone = true;      // residual_history strictly decreasing
  bool converged = false;
  bool stalled = false;      // NewtonStalled: best iterate returned
  int iterations = 0;
  double mass = 0.0;         // int_{B_tau} |x|^{2N} h e^u
  double resolution = 0.0;   // max over peaks of Peak::resolution
};

// Grid values of f at every node including the boundary ring.
std::vector<double> sample_on_grid(const PolarGrid& grid, const std::function<double(cplx)>& f);

// Damped Newton for the finite-volume discretization. initial has
// (n_r + 1) * n_theta entries; the boundary ring is overwritten by the data.
SolutionField solve(const DiskProblem& problem, const std::vector<double>& initial,
                    const SolveOptions& opt = {});

// Discrete maxima carrying at least half of the height above the boundary
// mean, refined by a quadratic least-squares fit and a Newton polish on the
// interpolant.
std::vector<Peak> detect_peaks(const GridField& u, const DiskProblem& problem);

struct QuadraticPeakFit {
  bool ok = false;
  cplx argmax;
  double max = 0.0;
};

// Least-squares quadratic through the nodes within radius of node (i, j);
// subtract, when set, is removed from the nodal values first.
QuadraticPeakFit fit_peak_quadratic(const GridField& u, int i, int j, double radius,
                                    const std::function<double(cplx)>& subtract = {});

double discrete_mass(const GridField& u, const DiskProblem& problem);

// Branch seeded from the family with xi = seed_delta^{N+1} and height
// lambda = mu - 2(N+1) log seed_delta, minus log h. Each step warm-starts from
// the previous solution plus the change of seed. A converged step that misses
// the resolution limit is re-solved on a grid whose clusters are moved to the
// measured peaks, at most max_regrids times.
struct BranchSpec {
  std::vector<double> mu;       // increasing
  double seed_delta = 0.2;
  double resolution_limit = 0.1;
  int max_regrids = 2;
  SolveOptions solve;
};

struct BranchResult {
  std::vector<SolutionField> steps;
  std::vector<double> boundary_values;
  std::vector<double> seed_mu;
  bool terminated = false;  // BranchTerminated
  std::string reason;
  std::optional<SolutionField> rejected;  // the step that ended the branch, if it was solved
  int regrids = 0;
};

BranchResult continue_branch(const DiskProblem& problem, const BranchSpec& spec);

// Grid clustered around the seed peaks of a branch.
GridSpec branch_grid(int N, double tau, double delta, double mu_max, int n_r, int n_theta);
// The same clusters moved to the peaks of a solution (radial focus at the mean
// peak radius, one angular focus per peak).
GridSpec recenter_grid(const GridSpec& grid, const std::vector<Peak>& peaks);

// v(y) = u(delta e^{i theta} y) + 2(N+1) log delta on |y| < tau/delta.
class ScaledField : public ScalarField {
 public:
  ScaledField(const ScalarField& u, int N, double delta, double theta, double tau);
  double value(cplx y) const override;
  cplx gradient(cplx y) const override;
  double domain_radius() const override { return radius_; }
  cplx to_x(cplx y) const { return rot_ * y; }

 private:
  const ScalarField& u_;
  cplx rot_;
  double offset_;
  double radius_;
};

ScaledField scale_to_v(const ScalarField& u, int N, double delta, double theta, double tau);

// u = phi + u_minus with phi harmonic, phi(0) = 0 and u_minus constant on the circle.
class ShiftedField : public ScalarField {
 public:
  ShiftedField(const ScalarField& u, HarmonicLift phi) : u_(u), phi_(std::move(phi)) {}
  double value(cplx p) const override { return u_.value(p) - phi_.value(p); }
  cplx gradient(cplx p) const override { return u_.gradient(p) - phi_.gradient(p); }
  double domain_radius() const override { return std::min(u_.domain_radius(), phi_.radius()); }

 private:
  const ScalarField& u_;
  HarmonicLift phi_;
};

struct Deoscillation {
  HarmonicLift phi;
  ShiftedField u_minus;
};

// Boundary trace sampled from u itself at equispaced angles on |x| = tau.
Deoscillation deoscillate(const ScalarField& u, double tau, int samples = 512);
// Boundary trace given explicitly.
Deoscillation deoscillate(const ScalarField& u, const std::function<double(double)>& trace,
                          double tau, int samples = 512);

// Blowup data from a scaled field and guesses of its maxima in y.
// Throws PeakCountMismatch unless N + 1 guesses are given.
BlowupData measure_blowup(const ScalarField& v, int N, const std::vector<cplx>& peaks_y,
                          double delta, double theta, cplx L);
// Same, from a solution: scales by its first peak; L is the rotated gradient of log h at 0.
BlowupData measure_blowup(const SolutionField& sol, const DiskProblem& problem);

// Mean of v over the circle |y| = rho.
double spherical_average(const ScalarField& v, double rho, int samples = 256);

}  // namespace liouville
