#include "liouville/refined_expansion.hpp"

#include <algorithm>

namespace liouville {

RefinedExpansion refined_expansion(const SolutionField& sol, const DiskProblem& problem, int boundary_samples) {
  if (problem.N != 0) throw Error(ErrorCode::InvalidArgument, "the expansion is for N = 0");
  if (sol.peaks.size() != 1)
    throw Error(ErrorCode::NotSingleBubble, std::to_string(sol.peaks.size()) + " peaks found");
  const PolarGrid& g = sol.grid;
  const GridField& u = sol.u;
  const Peak& pk = sol.peaks.front();

  RefinedExpansion out;
  const Deoscillation d = problem.boundary ? deoscillate(u, problem.boundary, problem.tau, boundary_samples)
                                           : deoscillate(u, problem.tau, boundary_samples);
  const double radius = 2.5 * g.spacing(pk.i, pk.j);
  const QuadraticPeakFit fu = fit_peak_quadratic(u, pk.i, pk.j, radius);
  out.x0 = fu.ok ? fu.argmax : pk.location;
  out.u0 = fu.ok ? fu.max : pk.height;
  out.psi = d.phi;
  out.psi.shift(out.psi.value(out.x0));
  const HarmonicLift& psi = out.psi;
  const QuadraticPeakFit fv =
      fit_peak_quadratic(u, pk.i, pk.j, radius, [&](cplx x) { return psi.value(x); });
  if (!fu.ok || !fv.ok) throw Error(ErrorCode::FitDiverged, "peak fit failed");
  out.q = fv.argmax - out.x0;

  out.eps = std::exp(-0.5 * out.u0);
  const Coefficient& V = problem.h;
  out.V0 = V.value(out.x0);
  out.grad_V0 = V.gradient(out.x0);
  out.lap_log_V0 = V.log_laplacian(out.x0);
  out.q_predicted = 2.0 * out.eps * out.eps * out.grad_V0 / (out.V0 * out.V0);
  out.log_coefficient = -8.0 * out.lap_log_V0 / out.V0;
  out.vanishing = std::abs(V.log_gradient(out.x0) + psi.gradient(out.x0));

  const double e2 = out.eps * out.eps;
  const double b = out.V0 / 8.0 * std::exp(out.u0);
  auto model = [&](cplx x) {
    const double s = std::log(2.0 + std::abs(x - out.x0) / out.eps);
    return out.u0 - 2.0 * std::log1p(b * std::norm(x - out.x0 - out.q)) + psi.value(x) +
           out.log_coefficient * e2 * s * s;
  };
  for (int i = 0; i <= g.n_r(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) ring = std::max(ring, std::abs(u.at(i, j) - model(g.point(i, j))));
    out.profile.emplace_back(g.r()[static_cast<std::size_t>(i)], ring);
    out.remainder = std::max(out.remainder, ring);
  }
  out.remainder_scale = e2 * std::log(1.0 / out.eps);
  out.remainder_ratio = out.remainder / out.remainder_scale;
  return out;
}

GridSpec expansion_grid(double tau, double eps_min, int n_r, int n_theta) {
  GridSpec s;
  s.tau = tau;
  s.n_r = n_r;
  s.n_theta = n_theta;
  s.radial.push_back({0.0, 0.3 * eps_min, 2.0});
  return s;
}

ExpansionSweepResult expansion_sweep(const ExpansionSweepSpec& spec) {
  if (spec.eps.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps list");
  std::vector<double> eps = spec.eps;
  for (double e : eps)
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1)");
  std::sort(eps.begin(), eps.end(), std::greater<>());

  DiskProblem P;
  P.N = 0;
  P.tau = spec.tau;
  P.h = spec.V;
  P.grid = expansion_grid(spec.tau, eps.back(), spec.n_r, spec.n_theta);
  P.validate();
  const PolarGrid g(P.grid);

  const int M = 512;
  std::vector<double> osc(M, 0.0);
  if (spec.oscillation)
    for (int k = 0; k < M; ++k) osc[static_cast<std::size_t>(k)] = spec.oscillation(two_pi * k / M);
  HarmonicLift lift(osc, spec.tau);
  lift.shift(lift.value(0.0));

  ExpansionSweepResult out;
  std::vector<double> prev_seed, prev_u;
  for (double e : eps) {
    const double u0 = -2.0 * std::log(e);
    const double b = std::exp(u0) / 8.0;
    const double c = u0 - 2.0 * std::log1p(b * spec.tau * spec.tau);
    DiskProblem step = P;
    const std::function<double(double)> osc_fn = spec.oscillation;
    step.boundary = [c, osc_fn](double t) { return c + (osc_fn ? osc_fn(t) : 0.0); };
    std::vector<double> seed =
        sample_on_grid(g, [&](cplx x) { return u0 - 2.0 * std::log1p(b * std::norm(x)) + lift.value(x); });
    std::vector<double> init = seed;
    if (!prev_u.empty())
      for (std::size_t k = 0; k < init.size(); ++k) init[k] = prev_u[k] + seed[k] - prev_seed[k];
    const SolutionField sol = solve(step, init, spec.solve);
    if (!sol.converged) {
      out.terminated = true;
      out.reason = "Newton stalled at eps " + std::to_string(e);
      break;
    }
    if (sol.resolution > 0.1) {
      out.terminated = true;
      out.reason = "grid resolution limit reached at eps " + std::to_string(e);
      break;
    }
    out.points.push_back(refined_expansion(sol, step));
    out.target_eps.push_back(e);
    prev_seed = std::move(seed);
    prev_u = sol.u.values();
  }
  return out;
}

}  // namespace liouville
